#pragma once

#include "json.hpp"
#include "uplift/strategies.hpp"

namespace uplift {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const StandardScaler& scaler);
nlohmann::json to_json(const LinearModel& model);
nlohmann::json to_json(const LogisticModel& model);
nlohmann::json to_json(const LdaModel& model);
nlohmann::json to_json(const ErtEnsemble& model);
nlohmann::json to_json(const LearnerSpec& spec);
nlohmann::json to_json(const StrategySpec& spec);

/// Versioned document; from-JSON rejects unknown versions.
nlohmann::json to_json(const FittedStrategy& model);

StandardScaler scaler_from_json(const nlohmann::json& j);
LinearModel linear_from_json(const nlohmann::json& j);
LogisticModel logistic_from_json(const nlohmann::json& j);
LdaModel lda_from_json(const nlohmann::json& j);
ErtEnsemble ert_from_json(const nlohmann::json& j);
LearnerSpec learner_spec_from_json(const nlohmann::json& j);
StrategySpec strategy_spec_from_json(const nlohmann::json& j);
FittedStrategy strategy_from_json(const nlohmann::json& j);

}  // namespace uplift
