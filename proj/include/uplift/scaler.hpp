#pragma once

#include "uplift/error.hpp"
#include "uplift/types.hpp"

namespace uplift {

/// Per-feature affine map to zero mean and unit variance. Constant features
/// keep scale 1 so the transform stays invertible.
struct StandardScaler {
    Vector mean;
    Vector scale;

    static StandardScaler fit(MatrixRef X) {
        StandardScaler s;
        const auto n = static_cast<double>(X.rows());
        s.mean = X.colwise().mean();
        s.scale = ((X.rowwise() - s.mean.transpose()).array().square().colwise().sum() / n)
                      .sqrt()
                      .transpose()
                      .matrix();
        for (Index j = 0; j < s.scale.size(); ++j) {
            if (s.scale[j] == 0.0) s.scale[j] = 1.0;
        }
        return s;
    }

    static StandardScaler identity(Index m) {
        return StandardScaler{Vector::Zero(m), Vector::Ones(m)};
    }

    Matrix transform(MatrixRef X) const {
        if (X.cols() != mean.size()) {
            throw DataError("scaler expects " + std::to_string(mean.size()) + " columns, got " +
                            std::to_string(X.cols()));
        }
        return ((X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array())
            .matrix();
    }
};

}  // namespace uplift
