#pragma once

#include <iosfwd>
#include <string>

#include "uplift/dataset.hpp"

namespace uplift {

/// Reads a header-first delimited file into a dataset.
///
/// Columns named `treatment`, `conversion` and `revenue` are required; a
/// `true_uplift` column is attached as the oracle column when present. Every
/// other column is a numeric covariate, kept in file order. Malformed input
/// raises DataError naming the offending line.
UpliftDataset load_csv(const std::string& path);
UpliftDataset load_csv(std::istream& in, const std::string& label);

/// Writes covariates, the three required columns and any oracle column with
/// round-trip-exact float formatting.
void save_csv(const UpliftDataset& dataset, const std::string& path);
void save_csv(const UpliftDataset& dataset, std::ostream& out);

}  // namespace uplift
