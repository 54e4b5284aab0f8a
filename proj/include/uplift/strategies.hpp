#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "uplift/dataset.hpp"
#include "uplift/ert.hpp"
#include "uplift/lda.hpp"
#include "uplift/linear.hpp"
#include "uplift/logistic.hpp"
#include "uplift/smote.hpp"
#include "uplift/transforms.hpp"

namespace uplift {

/// ORACLE scores by the dataset's oracle column and CONSTANT scores zero;
/// both are diagnostics baselines, not fitted models.
enum class StrategyKind { Rdt, Crvtw, Itm, Indirect, Response, Oracle, Constant };
enum class StageKind { OneStage, TwoStage, TwoStageSmote };
enum class LearnerKind { Ols, Ridge, Logistic, Lda, Ert };

std::string to_string(StrategyKind kind);
std::string to_string(StageKind stage);
std::string to_string(LearnerKind kind);
StrategyKind strategy_kind_from_string(const std::string& s);
StageKind stage_kind_from_string(const std::string& s);
LearnerKind learner_kind_from_string(const std::string& s);

struct LearnerSpec {
    LearnerKind kind = LearnerKind::Ridge;
    double alpha = 1.0;         // ridge
    double lambda = 1e-2;       // logistic
    Penalty penalty = Penalty::L2;
    ErtConfig ert;

    static LearnerSpec ols();
    static LearnerSpec ridge(double alpha);
    static LearnerSpec logistic(double lambda, Penalty penalty = Penalty::L2);
    static LearnerSpec lda();
    static LearnerSpec extra_trees(const ErtConfig& config = {});
};

struct StrategySpec {
    StrategyKind kind = StrategyKind::Crvtw;
    StageKind stage = StageKind::OneStage;
    LearnerSpec classifier = LearnerSpec::logistic(1e-2);
    LearnerSpec regressor = LearnerSpec::ridge(1.0);
    TargetKind target = TargetKind::Revenue;
    // CRVTW two-stage: regress raw buyer revenue instead of the transformed
    // target.
    bool second_stage_raw_revenue = false;
    SmoteConfig smote;
    std::string label;

    void validate() const;
    bool needs_classifier() const;
    bool needs_regressor() const;
    std::string name() const;  // label, or kind_stage when empty
};

using Classifier = std::variant<LogisticModel, LdaModel, ErtEnsemble>;
using Regressor = std::variant<LinearModel, ErtEnsemble>;

Vector classify(const Classifier& model, MatrixRef X);
Vector regress(const Regressor& model, MatrixRef X);

/// Control-side slots are used by INDIRECT (both) and ITM two-stage (the
/// control-arm regressor).
struct FittedStrategy {
    StrategySpec spec;
    GroupShares shares;
    Index n_features = 0;
    std::vector<std::string> feature_names;
    std::optional<Classifier> classifier;
    std::optional<Regressor> regressor;
    std::optional<Classifier> classifier_control;
    std::optional<Regressor> regressor_control;
};

FittedStrategy fit_strategy(const StrategySpec& spec, const UpliftDataset& train);

/// One finite uplift score per record, aligned with the input order.
Vector score(const FittedStrategy& model, const UpliftDataset& data);

enum class SelectionMetric { QiniRevenue };

struct CandidateResult {
    double valid_qini = 0.0;
    bool ok = false;
    std::string error;
};

struct SelectionResult {
    StrategySpec best;
    FittedStrategy model;
    std::size_t best_index = 0;
    std::vector<CandidateResult> candidates;
};

/// Fits every candidate on train, ranks by validation Qini (ties keep the
/// earliest grid entry), then refits the winner on train plus validation.
/// Candidates that fail to fit or evaluate are skipped; if all fail, the
/// errors are aggregated into one FitError.
SelectionResult select_model(const std::vector<StrategySpec>& grid, const UpliftDataset& train,
                             const UpliftDataset& valid,
                             SelectionMetric metric = SelectionMetric::QiniRevenue,
                             Index bins = 10);

}  // namespace uplift
