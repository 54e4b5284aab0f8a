#include "uplift/model_io.hpp"

#include <string>
#include <vector>

#include "uplift/error.hpp"

namespace uplift {

namespace {

using nlohmann::json;

json vector_to_json(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from_json(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vector_to_json(m.row(i).transpose()));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0) return Matrix(0, 0);
    Matrix m(rows, static_cast<Index>(j.at(0).size()));
    for (Index i = 0; i < rows; ++i) {
        const Vector row = vector_from_json(j.at(static_cast<std::size_t>(i)));
        if (row.size() != m.cols()) throw DataError("ragged matrix in model document");
        m.row(i) = row.transpose();
    }
    return m;
}

std::string penalty_to_string(Penalty penalty) { return penalty == Penalty::L1 ? "l1" : "l2"; }

Penalty penalty_from_string(const std::string& s) {
    if (s == "l1") return Penalty::L1;
    if (s == "l2") return Penalty::L2;
    throw DataError("unknown penalty '" + s + "'");
}

json classifier_to_json(const Classifier& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            json j = to_json(m);
            if constexpr (std::is_same_v<T, LogisticModel>) {
                j["type"] = "logistic";
            } else if constexpr (std::is_same_v<T, LdaModel>) {
                j["type"] = "lda";
            } else {
                j["type"] = "ert";
            }
            return j;
        },
        model);
}

Classifier classifier_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "logistic") return logistic_from_json(j);
    if (type == "lda") return lda_from_json(j);
    if (type == "ert") return ert_from_json(j);
    throw DataError("unknown classifier type '" + type + "'");
}

json regressor_to_json(const Regressor& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            json j = to_json(m);
            j["type"] = std::is_same_v<T, LinearModel> ? "linear" : "ert";
            return j;
        },
        model);
}

Regressor regressor_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "linear") return linear_from_json(j);
    if (type == "ert") return ert_from_json(j);
    throw DataError("unknown regressor type '" + type + "'");
}

}  // namespace

json to_json(const StandardScaler& scaler) {
    return json{{"mean", vector_to_json(scaler.mean)}, {"scale", vector_to_json(scaler.scale)}};
}

StandardScaler scaler_from_json(const json& j) {
    StandardScaler scaler{vector_from_json(j.at("mean")), vector_from_json(j.at("scale"))};
    if (scaler.mean.size() != scaler.scale.size()) {
        throw DataError("scaler mean and scale arrays have different lengths");
    }
    return scaler;
}

json to_json(const LinearModel& model) {
    return json{{"coefficients", vector_to_json(model.coefficients)},
                {"intercept", model.intercept},
                {"alpha", model.alpha},
                {"standardized", model.standardized},
                {"scaler", to_json(model.scaler)}};
}

LinearModel linear_from_json(const json& j) {
    LinearModel model;
    model.coefficients = vector_from_json(j.at("coefficients"));
    model.intercept = j.at("intercept").get<double>();
    model.alpha = j.at("alpha").get<double>();
    model.standardized = j.at("standardized").get<bool>();
    model.scaler = scaler_from_json(j.at("scaler"));
    return model;
}

json to_json(const LogisticModel& model) {
    return json{{"coefficients", vector_to_json(model.coefficients)},
                {"intercept", model.intercept},
                {"lambda", model.lambda},
                {"penalty", penalty_to_string(model.penalty)},
                {"standardized", model.standardized},
                {"scaler", to_json(model.scaler)},
                {"iterations", model.report.iterations},
                {"gradient_norm", model.report.gradient_norm}};
}

LogisticModel logistic_from_json(const json& j) {
    LogisticModel model;
    model.coefficients = vector_from_json(j.at("coefficients"));
    model.intercept = j.at("intercept").get<double>();
    model.lambda = j.at("lambda").get<double>();
    model.penalty = penalty_from_string(j.at("penalty").get<std::string>());
    model.standardized = j.at("standardized").get<bool>();
    model.scaler = scaler_from_json(j.at("scaler"));
    model.report.iterations = j.at("iterations").get<int>();
    model.report.gradient_norm = j.at("gradient_norm").get<double>();
    model.report.converged = true;
    return model;
}

json to_json(const LdaModel& model) {
    return json{{"class_means", matrix_to_json(model.class_means)},
                {"priors", vector_to_json(model.priors)},
                {"covariance", matrix_to_json(model.covariance)},
                {"ridge", model.ridge},
                {"coefficients", vector_to_json(model.coefficients)},
                {"intercept", model.intercept},
                {"scaler", to_json(model.scaler)}};
}

LdaModel lda_from_json(const json& j) {
    LdaModel model;
    model.class_means = matrix_from_json(j.at("class_means"));
    model.priors = vector_from_json(j.at("priors"));
    model.covariance = matrix_from_json(j.at("covariance"));
    model.ridge = j.at("ridge").get<double>();
    model.coefficients = vector_from_json(j.at("coefficients"));
    model.intercept = j.at("intercept").get<double>();
    model.scaler = scaler_from_json(j.at("scaler"));
    return model;
}

json to_json(const ErtEnsemble& model) {
    json trees = json::array();
    for (const ErtTree& tree : model.trees) {
        json nodes = json::array();
        for (const ErtNode& node : tree.nodes) {
            nodes.push_back({node.feature, node.threshold, node.left, node.right, node.value});
        }
        trees.push_back(std::move(nodes));
    }
    return json{{"trees", std::move(trees)},
                {"n_features", model.n_features},
                {"n_trees", model.config.n_trees},
                {"max_features", model.config.max_features},
                {"min_samples_leaf", model.config.min_samples_leaf},
                {"n_random_cuts", model.config.n_random_cuts},
                {"seed", model.config.seed}};
}

ErtEnsemble ert_from_json(const json& j) {
    ErtEnsemble model;
    model.n_features = j.at("n_features").get<Index>();
    model.config.n_trees = j.at("n_trees").get<int>();
    model.config.max_features = j.at("max_features").get<int>();
    model.config.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    model.config.n_random_cuts = j.at("n_random_cuts").get<int>();
    model.config.seed = j.at("seed").get<std::uint64_t>();
    for (const json& tree_json : j.at("trees")) {
        ErtTree tree;
        for (const json& node_json : tree_json) {
            if (node_json.size() != 5) throw DataError("malformed tree node in model document");
            ErtNode node;
            node.feature = node_json.at(0).get<int>();
            node.threshold = node_json.at(1).get<double>();
            node.left = node_json.at(2).get<int>();
            node.right = node_json.at(3).get<int>();
            node.value = node_json.at(4).get<double>();
            tree.nodes.push_back(node);
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

json to_json(const LearnerSpec& spec) {
    json j{{"learner", to_string(spec.kind)}};
    switch (spec.kind) {
        case LearnerKind::Ridge:
            j["alpha"] = spec.alpha;
            break;
        case LearnerKind::Logistic:
            j["lambda"] = spec.lambda;
            j["penalty"] = penalty_to_string(spec.penalty);
            break;
        case LearnerKind::Ert:
            j["n_trees"] = spec.ert.n_trees;
            j["max_features"] = spec.ert.max_features;
            j["min_samples_leaf"] = spec.ert.min_samples_leaf;
            j["n_random_cuts"] = spec.ert.n_random_cuts;
            j["seed"] = spec.ert.seed;
            j["n_threads"] = spec.ert.n_threads;
            break;
        default:
            break;
    }
    return j;
}

LearnerSpec learner_spec_from_json(const json& j) {
    LearnerSpec spec;
    spec.kind = learner_kind_from_string(j.at("learner").get<std::string>());
    spec.alpha = j.value("alpha", spec.alpha);
    spec.lambda = j.value("lambda", spec.lambda);
    if (j.contains("penalty")) {
        spec.penalty = penalty_from_string(j.at("penalty").get<std::string>());
    }
    spec.ert.n_trees = j.value("n_trees", spec.ert.n_trees);
    spec.ert.max_features = j.value("max_features", spec.ert.max_features);
    spec.ert.min_samples_leaf = j.value("min_samples_leaf", spec.ert.min_samples_leaf);
    spec.ert.n_random_cuts = j.value("n_random_cuts", spec.ert.n_random_cuts);
    spec.ert.seed = j.value("seed", spec.ert.seed);
    spec.ert.n_threads = j.value("n_threads", spec.ert.n_threads);
    return spec;
}

json to_json(const StrategySpec& spec) {
    json j{{"kind", to_string(spec.kind)},
           {"stage", to_string(spec.stage)},
           {"target", spec.target == TargetKind::Revenue ? "revenue" : "conversion"}};
    if (spec.needs_classifier()) j["classifier"] = to_json(spec.classifier);
    if (spec.needs_regressor()) j["regressor"] = to_json(spec.regressor);
    if (spec.kind == StrategyKind::Crvtw && spec.stage == StageKind::TwoStage) {
        j["second_stage_raw_revenue"] = spec.second_stage_raw_revenue;
    }
    if (spec.stage == StageKind::TwoStageSmote) {
        j["smote"] = json{{"k", spec.smote.k},
                          {"target_minority_count", spec.smote.target_minority_count},
                          {"seed", spec.smote.seed}};
    }
    if (!spec.label.empty()) j["label"] = spec.label;
    return j;
}

StrategySpec strategy_spec_from_json(const json& j) {
    StrategySpec spec;
    spec.kind = strategy_kind_from_string(j.at("kind").get<std::string>());
    spec.stage = stage_kind_from_string(j.value("stage", std::string("one_stage")));
    if (j.contains("target")) {
        const auto target = j.at("target").get<std::string>();
        if (target == "revenue") {
            spec.target = TargetKind::Revenue;
        } else if (target == "conversion") {
            spec.target = TargetKind::Conversion;
        } else {
            throw DataError("unknown target '" + target + "'");
        }
    }
    if (j.contains("classifier")) spec.classifier = learner_spec_from_json(j.at("classifier"));
    if (j.contains("regressor")) spec.regressor = learner_spec_from_json(j.at("regressor"));
    spec.second_stage_raw_revenue = j.value("second_stage_raw_revenue", false);
    if (j.contains("smote")) {
        const json& s = j.at("smote");
        spec.smote.k = s.value("k", spec.smote.k);
        spec.smote.target_minority_count =
            s.value("target_minority_count", spec.smote.target_minority_count);
        spec.smote.seed = s.value("seed", spec.smote.seed);
    }
    spec.label = j.value("label", std::string());
    spec.validate();
    return spec;
}

json to_json(const FittedStrategy& model) {
    json j{{"format_version", kModelFormatVersion},
           {"spec", to_json(model.spec)},
           {"n_features", model.n_features},
           {"feature_names", model.feature_names},
           {"shares",
            json{{"n_treatment", model.shares.n_treatment},
                 {"n_control", model.shares.n_control},
                 {"n_total", model.shares.n_total},
                 {"treatment_share", model.shares.treatment_share},
                 {"control_share", model.shares.control_share}}}};
    if (model.classifier) j["classifier"] = classifier_to_json(*model.classifier);
    if (model.regressor) j["regressor"] = regressor_to_json(*model.regressor);
    if (model.classifier_control) {
        j["classifier_control"] = classifier_to_json(*model.classifier_control);
    }
    if (model.regressor_control) {
        j["regressor_control"] = regressor_to_json(*model.regressor_control);
    }
    return j;
}

FittedStrategy strategy_from_json(const json& j) {
    if (j.value("format_version", -1) != kModelFormatVersion) {
        throw DataError("unsupported model format version");
    }
    try {
        FittedStrategy model;
        model.spec = strategy_spec_from_json(j.at("spec"));
        model.n_features = j.at("n_features").get<Index>();
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const json& shares = j.at("shares");
        model.shares.n_treatment = shares.at("n_treatment").get<Index>();
        model.shares.n_control = shares.at("n_control").get<Index>();
        model.shares.n_total = shares.at("n_total").get<Index>();
        model.shares.treatment_share = shares.at("treatment_share").get<double>();
        model.shares.control_share = shares.at("control_share").get<double>();
        if (j.contains("classifier")) model.classifier = classifier_from_json(j.at("classifier"));
        if (j.contains("regressor")) model.regressor = regressor_from_json(j.at("regressor"));
        if (j.contains("classifier_control")) {
            model.classifier_control = classifier_from_json(j.at("classifier_control"));
        }
        if (j.contains("regressor_control")) {
            model.regressor_control = regressor_from_json(j.at("regressor_control"));
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    }
}

}  // namespace uplift
