#include "uplift/strategies.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "uplift/evaluation.hpp"

namespace uplift {

namespace {

std::vector<Index> rows_where(const UpliftDataset& data, bool want_treatment, int group,
                              bool buyers_only) {
    std::vector<Index> rows;
    for (Index i = 0; i < data.size(); ++i) {
        if (want_treatment && data.treatment()[i] != group) continue;
        if (buyers_only && data.conversion()[i] != 1) continue;
        rows.push_back(i);
    }
    return rows;
}

Matrix take_rows(MatrixRef source, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), source.cols());
    for (Index i = 0; i < out.rows(); ++i) out.row(i) = source.row(rows[static_cast<std::size_t>(i)]);
    return out;
}

Vector take_vector(VectorRef source, const std::vector<Index>& rows) {
    Vector out(static_cast<Index>(rows.size()));
    for (Index i = 0; i < out.size(); ++i) out[i] = source[rows[static_cast<std::size_t>(i)]];
    return out;
}

Vector int_to_double(const IntVector& v) { return v.cast<double>(); }

Classifier fit_classifier(const LearnerSpec& spec, MatrixRef X, VectorRef y) {
    switch (spec.kind) {
        case LearnerKind::Logistic:
            return fit_logistic(X, y, spec.lambda, spec.penalty);
        case LearnerKind::Lda:
            return fit_lda(X, y);
        case LearnerKind::Ert:
            return fit_ert(X, y, spec.ert);
        default:
            throw DataError("learner '" + to_string(spec.kind) + "' is not a classifier");
    }
}

Regressor fit_regressor(const LearnerSpec& spec, MatrixRef X, VectorRef y) {
    switch (spec.kind) {
        case LearnerKind::Ols:
            return fit_linear(X, y, 0.0);
        case LearnerKind::Ridge:
            return fit_linear(X, y, spec.alpha);
        case LearnerKind::Ert:
            return fit_ert(X, y, spec.ert);
        default:
            throw DataError("learner '" + to_string(spec.kind) + "' is not a regressor");
    }
}

void require_rows(const std::vector<Index>& rows, const char* what) {
    if (rows.empty()) throw FitError(std::string(what) + " is empty; cannot fit this stage");
}

// Second stage of a two-stage composition: amount model on buyer rows.
Regressor fit_buyer_regressor(const LearnerSpec& spec, const UpliftDataset& train,
                              const std::vector<Index>& buyers, VectorRef target) {
    require_rows(buyers, "buyer subset");
    return fit_regressor(spec, take_rows(train.covariates(), buyers), take_vector(target, buyers));
}

}  // namespace

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Rdt: return "rdt";
        case StrategyKind::Crvtw: return "crvtw";
        case StrategyKind::Itm: return "itm";
        case StrategyKind::Indirect: return "indirect";
        case StrategyKind::Response: return "response";
        case StrategyKind::Oracle: return "oracle";
        case StrategyKind::Constant: return "constant";
    }
    throw DataError("unknown strategy kind");
}

std::string to_string(StageKind stage) {
    switch (stage) {
        case StageKind::OneStage: return "one_stage";
        case StageKind::TwoStage: return "two_stage";
        case StageKind::TwoStageSmote: return "two_stage_smote";
    }
    throw DataError("unknown stage kind");
}

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Ols: return "ols";
        case LearnerKind::Ridge: return "ridge";
        case LearnerKind::Logistic: return "logistic";
        case LearnerKind::Lda: return "lda";
        case LearnerKind::Ert: return "ert";
    }
    throw DataError("unknown learner kind");
}

StrategyKind strategy_kind_from_string(const std::string& s) {
    if (s == "rdt") return StrategyKind::Rdt;
    if (s == "crvtw") return StrategyKind::Crvtw;
    if (s == "itm") return StrategyKind::Itm;
    if (s == "indirect") return StrategyKind::Indirect;
    if (s == "response") return StrategyKind::Response;
    if (s == "oracle") return StrategyKind::Oracle;
    if (s == "constant") return StrategyKind::Constant;
    throw DataError("unknown strategy kind '" + s + "'");
}

StageKind stage_kind_from_string(const std::string& s) {
    if (s == "one_stage") return StageKind::OneStage;
    if (s == "two_stage") return StageKind::TwoStage;
    if (s == "two_stage_smote") return StageKind::TwoStageSmote;
    throw DataError("unknown stage kind '" + s + "'");
}

LearnerKind learner_kind_from_string(const std::string& s) {
    if (s == "ols") return LearnerKind::Ols;
    if (s == "ridge") return LearnerKind::Ridge;
    if (s == "logistic") return LearnerKind::Logistic;
    if (s == "lda") return LearnerKind::Lda;
    if (s == "ert") return LearnerKind::Ert;
    throw DataError("unknown learner kind '" + s + "'");
}

LearnerSpec LearnerSpec::ols() {
    LearnerSpec spec;
    spec.kind = LearnerKind::Ols;
    return spec;
}

LearnerSpec LearnerSpec::ridge(double alpha) {
    LearnerSpec spec;
    spec.kind = LearnerKind::Ridge;
    spec.alpha = alpha;
    return spec;
}

LearnerSpec LearnerSpec::logistic(double lambda, Penalty penalty) {
    LearnerSpec spec;
    spec.kind = LearnerKind::Logistic;
    spec.lambda = lambda;
    spec.penalty = penalty;
    return spec;
}

LearnerSpec LearnerSpec::lda() {
    LearnerSpec spec;
    spec.kind = LearnerKind::Lda;
    return spec;
}

LearnerSpec LearnerSpec::extra_trees(const ErtConfig& config) {
    LearnerSpec spec;
    spec.kind = LearnerKind::Ert;
    spec.ert = config;
    return spec;
}

bool StrategySpec::needs_classifier() const {
    if (kind == StrategyKind::Oracle || kind == StrategyKind::Constant) return false;
    if (stage != StageKind::OneStage) return true;
    return kind == StrategyKind::Rdt;
}

bool StrategySpec::needs_regressor() const {
    if (kind == StrategyKind::Oracle || kind == StrategyKind::Constant) return false;
    if (kind == StrategyKind::Rdt) return stage == StageKind::TwoStage;
    return true;
}

void StrategySpec::validate() const {
    if (stage == StageKind::TwoStageSmote && kind != StrategyKind::Rdt) {
        throw DataError("two_stage_smote is only defined for the rdt strategy");
    }
    if ((kind == StrategyKind::Oracle || kind == StrategyKind::Constant) &&
        stage != StageKind::OneStage) {
        throw DataError(to_string(kind) + " baseline has no staging");
    }
    if (needs_classifier()) {
        switch (classifier.kind) {
            case LearnerKind::Logistic:
            case LearnerKind::Lda:
            case LearnerKind::Ert:
                break;
            default:
                throw DataError("'" + to_string(classifier.kind) + "' cannot serve as classifier");
        }
    }
    if (needs_regressor()) {
        switch (regressor.kind) {
            case LearnerKind::Ols:
            case LearnerKind::Ridge:
            case LearnerKind::Ert:
                break;
            default:
                throw DataError("'" + to_string(regressor.kind) + "' cannot serve as regressor");
        }
    }
}

std::string StrategySpec::name() const {
    if (!label.empty()) return label;
    return to_string(kind) + "_" + to_string(stage);
}

Vector classify(const Classifier& model, MatrixRef X) {
    return std::visit(
        [&](const auto& m) -> Vector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ErtEnsemble>) {
                return m.predict(X);
            } else {
                return m.predict_proba(X);
            }
        },
        model);
}

Vector regress(const Regressor& model, MatrixRef X) {
    return std::visit([&](const auto& m) -> Vector { return m.predict(X); }, model);
}

FittedStrategy fit_strategy(const StrategySpec& spec, const UpliftDataset& train) {
    spec.validate();
    FittedStrategy fitted;
    fitted.spec = spec;
    fitted.shares = group_shares(train);
    fitted.n_features = train.dim();
    fitted.feature_names = train.feature_names();

    if (spec.kind == StrategyKind::Oracle || spec.kind == StrategyKind::Constant) return fitted;

    const Matrix& X = train.covariates();
    const Vector buyers01 = int_to_double(train.conversion());
    const std::vector<Index> buyers = rows_where(train, false, 0, true);

    switch (spec.kind) {
        case StrategyKind::Rdt: {
            const Vector z = int_to_double(rdt(train).values);
            if (spec.stage == StageKind::OneStage) {
                fitted.classifier = fit_classifier(spec.classifier, X, z);
            } else if (spec.stage == StageKind::TwoStage) {
                fitted.classifier = fit_classifier(spec.classifier, X, z);
                fitted.regressor = fit_buyer_regressor(spec.regressor, train, buyers, train.revenue());
            } else {
                const auto [Xs, zs] = smote(X, z, spec.smote);
                fitted.classifier = fit_classifier(spec.classifier, Xs, zs);
            }
            break;
        }
        case StrategyKind::Crvtw: {
            const Vector z = crvtw(train, spec.target).values;
            if (spec.stage == StageKind::OneStage) {
                fitted.regressor = fit_regressor(spec.regressor, X, z);
            } else {
                fitted.classifier = fit_classifier(spec.classifier, X, buyers01);
                fitted.regressor = fit_buyer_regressor(
                    spec.regressor, train, buyers,
                    spec.second_stage_raw_revenue ? train.revenue() : z);
            }
            break;
        }
        case StrategyKind::Itm: {
            const Matrix augmented = itm_augment(train).values;
            if (spec.stage == StageKind::OneStage) {
                fitted.regressor = fit_regressor(spec.regressor, augmented, train.revenue());
            } else {
                fitted.classifier = fit_classifier(spec.classifier, X, buyers01);
                const std::vector<Index> treated_buyers = rows_where(train, true, 1, true);
                const std::vector<Index> control_buyers = rows_where(train, true, 0, true);
                require_rows(treated_buyers, "treatment buyer subset");
                require_rows(control_buyers, "control buyer subset");
                fitted.regressor = fit_regressor(spec.regressor,
                                                 take_rows(augmented, treated_buyers),
                                                 take_vector(train.revenue(), treated_buyers));
                fitted.regressor_control = fit_regressor(spec.regressor,
                                                         take_rows(augmented, control_buyers),
                                                         take_vector(train.revenue(), control_buyers));
            }
            break;
        }
        case StrategyKind::Indirect: {
            const std::vector<Index> treated = rows_where(train, true, 1, false);
            const std::vector<Index> control = rows_where(train, true, 0, false);
            require_rows(treated, "treatment group");
            require_rows(control, "control group");
            if (spec.stage == StageKind::OneStage) {
                fitted.regressor = fit_regressor(spec.regressor, take_rows(X, treated),
                                                 take_vector(train.revenue(), treated));
                fitted.regressor_control = fit_regressor(spec.regressor, take_rows(X, control),
                                                         take_vector(train.revenue(), control));
            } else {
                for (const auto& [rows, clf_slot, reg_slot] :
                     {std::tuple{&treated, &fitted.classifier, &fitted.regressor},
                      std::tuple{&control, &fitted.classifier_control,
                                 &fitted.regressor_control}}) {
                    const Matrix Xg = take_rows(X, *rows);
                    const Vector yg = take_rows(train.revenue(), *rows);
                    const Vector cg = take_vector(buyers01, *rows);
                    *clf_slot = fit_classifier(spec.classifier, Xg, cg);
                    std::vector<Index> group_buyers;
                    for (Index i = 0; i < cg.size(); ++i) {
                        if (cg[i] == 1.0) group_buyers.push_back(i);
                    }
                    require_rows(group_buyers, "group buyer subset");
                    *reg_slot = fit_regressor(spec.regressor, take_rows(Xg, group_buyers),
                                              take_vector(yg, group_buyers));
                }
            }
            break;
        }
        case StrategyKind::Response: {
            const std::vector<Index> treated = rows_where(train, true, 1, false);
            require_rows(treated, "treatment group");
            const Matrix Xt = take_rows(X, treated);
            const Vector yt = take_vector(train.revenue(), treated);
            if (spec.stage == StageKind::OneStage) {
                fitted.regressor = fit_regressor(spec.regressor, Xt, yt);
            } else {
                const Vector ct = take_vector(buyers01, treated);
                fitted.classifier = fit_classifier(spec.classifier, Xt, ct);
                std::vector<Index> treated_buyers;
                for (Index i = 0; i < ct.size(); ++i) {
                    if (ct[i] == 1.0) treated_buyers.push_back(i);
                }
                require_rows(treated_buyers, "treatment buyer subset");
                fitted.regressor = fit_regressor(spec.regressor, take_rows(Xt, treated_buyers),
                                                 take_vector(yt, treated_buyers));
            }
            break;
        }
        default:
            throw DataError("unreachable strategy kind");
    }
    return fitted;
}

Vector score(const FittedStrategy& model, const UpliftDataset& data) {
    if (data.dim() != model.n_features) {
        throw DataError("dataset has " + std::to_string(data.dim()) + " features, model expects " +
                        std::to_string(model.n_features));
    }
    const Matrix& X = data.covariates();
    Vector scores;
    switch (model.spec.kind) {
        case StrategyKind::Oracle:
            if (!data.true_uplift()) {
                throw DataError("oracle baseline needs a dataset with the oracle column");
            }
            scores = *data.true_uplift();
            break;
        case StrategyKind::Constant:
            scores = Vector::Zero(data.size());
            break;
        case StrategyKind::Rdt:
            scores = classify(*model.classifier, X);
            if (model.spec.stage == StageKind::TwoStage) {
                scores = scores.cwiseProduct(regress(*model.regressor, X));
            }
            break;
        case StrategyKind::Crvtw:
            scores = regress(*model.regressor, X);
            if (model.spec.stage != StageKind::OneStage) {
                scores = scores.cwiseProduct(classify(*model.classifier, X));
            }
            break;
        case StrategyKind::Itm: {
            const Matrix treated_design = itm_augment(data, 1).values;
            const Matrix control_design = itm_augment(data, 0).values;
            if (model.spec.stage == StageKind::OneStage) {
                scores = regress(*model.regressor, treated_design) -
                         regress(*model.regressor, control_design);
            } else {
                scores = classify(*model.classifier, X)
                             .cwiseProduct(regress(*model.regressor, treated_design) -
                                           regress(*model.regressor_control, control_design));
            }
            break;
        }
        case StrategyKind::Indirect:
            if (model.spec.stage == StageKind::OneStage) {
                scores = regress(*model.regressor, X) - regress(*model.regressor_control, X);
            } else {
                scores = classify(*model.classifier, X).cwiseProduct(regress(*model.regressor, X)) -
                         classify(*model.classifier_control, X)
                             .cwiseProduct(regress(*model.regressor_control, X));
            }
            break;
        case StrategyKind::Response:
            scores = regress(*model.regressor, X);
            if (model.spec.stage != StageKind::OneStage) {
                scores = scores.cwiseProduct(classify(*model.classifier, X));
            }
            break;
    }
    if (!scores.allFinite()) throw FitError("strategy produced non-finite scores");
    return scores;
}

SelectionResult select_model(const std::vector<StrategySpec>& grid, const UpliftDataset& train,
                             const UpliftDataset& valid, SelectionMetric metric, Index bins) {
    if (grid.empty()) throw DataError("selection grid is empty");
    if (metric != SelectionMetric::QiniRevenue) throw DataError("unknown selection metric");

    SelectionResult result;
    result.candidates.resize(grid.size());
    double best_qini = -std::numeric_limits<double>::infinity();
    std::size_t best_index = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CandidateResult& candidate = result.candidates[i];
        try {
            const FittedStrategy fitted = fit_strategy(grid[i], train);
            const Vector scores = score(fitted, valid);
            candidate.valid_qini = qini_coefficient(qini_curve(decile_table(scores, valid, bins)));
            candidate.ok = true;
        } catch (const std::runtime_error& err) {
            candidate.error = err.what();
            continue;
        }
        if (candidate.valid_qini > best_qini) {
            best_qini = candidate.valid_qini;
            best_index = i;
        }
    }
    if (best_index == grid.size()) {
        std::string combined = "every selection candidate failed:";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            combined += "\n  [" + std::to_string(i) + "] " + grid[i].name() + ": " +
                        result.candidates[i].error;
        }
        throw FitError(combined);
    }
    result.best = grid[best_index];
    result.best_index = best_index;
    result.model = fit_strategy(result.best, concat(train, valid));
    return result;
}

}  // namespace uplift
