#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uplift/csv.hpp"
#include "uplift/dataset.hpp"
#include "uplift/error.hpp"
#include "uplift/evaluation.hpp"
#include "uplift/model_io.hpp"
#include "uplift/strategies.hpp"
#include "uplift/synthgen.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Usage/config mistakes; maps to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw uplift::DataError("cannot open '" + path + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& err) {
        throw UsageError("invalid JSON in '" + path + "': " + err.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw uplift::DataError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw uplift::DataError("write to '" + path.string() + "' failed");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

json shares_to_json(const uplift::GroupShares& shares) {
    return json{{"n_treatment", shares.n_treatment},
                {"n_control", shares.n_control},
                {"n_total", shares.n_total},
                {"treatment_share", shares.treatment_share},
                {"control_share", shares.control_share}};
}

json group_summary_to_json(const uplift::GroupSummary& group) {
    return json{{"sessions", group.sessions},
                {"purchasers", group.purchasers},
                {"conversion_rate", group.conversion_rate},
                {"revenue_total", group.revenue_total},
                {"revenue_per_person", group.revenue_per_person}};
}

json summary_to_json(const uplift::UpliftSummary& summary) {
    return json{{"treatment", group_summary_to_json(summary.treatment)},
                {"control", group_summary_to_json(summary.control)},
                {"conversion_uplift", summary.conversion_uplift},
                {"revenue_uplift", summary.revenue_uplift}};
}

struct EvaluationOptions {
    uplift::Index bins = 10;
    bool per_person = false;
    bool scaled = false;
    bool normalized_weighted_qini = false;
};

json qini_report(const uplift::QiniCurve& curve, const EvaluationOptions& options) {
    json j{{"bins", curve.cumulative.size()},
           {"n", curve.n},
           {"per_person", curve.per_person},
           {"scaled", curve.scaled},
           {"cumulative", std::vector<double>(curve.cumulative.data(),
                                              curve.cumulative.data() + curve.cumulative.size())},
           {"baseline", std::vector<double>(curve.baseline.data(),
                                            curve.baseline.data() + curve.baseline.size())},
           {"qini", uplift::qini_coefficient(curve)}};
    if (curve.cumulative.size() == 10) {
        j["weighted_qini"] =
            uplift::weighted_qini(curve.cumulative, options.normalized_weighted_qini);
        j["weighted_qini_normalized"] = options.normalized_weighted_qini;
    } else {
        j["weighted_qini"] = nullptr;
    }
    return j;
}

std::string deciles_csv(const uplift::DecileTable& table, const uplift::QiniCurve& curve) {
    std::string out =
        "bin,n_treatment,n_control,conversions_treatment,conversions_control,"
        "revenue_treatment,revenue_control,mean_revenue_treatment,mean_revenue_control,"
        "incremental_revenue,cumulative,baseline\n";
    for (std::size_t d = 0; d < table.bins.size(); ++d) {
        const uplift::DecileBin& bin = table.bins[d];
        const auto i = static_cast<uplift::Index>(d);
        out += std::to_string(d + 1) + ',' + std::to_string(bin.n_treatment) + ',' +
               std::to_string(bin.n_control) + ',' + std::to_string(bin.conversions_treatment) +
               ',' + std::to_string(bin.conversions_control) + ',' +
               format_double(bin.revenue_treatment) + ',' + format_double(bin.revenue_control) +
               ',' + format_double(bin.mean_revenue_treatment) + ',' +
               format_double(bin.mean_revenue_control) + ',' +
               format_double(bin.incremental_revenue) + ',' + format_double(curve.cumulative[i]) +
               ',' + format_double(curve.baseline[i]) + '\n';
    }
    return out;
}

std::string profit_csv(const uplift::ProfitReport& report) {
    std::string out = "depth,incremental_revenue,contact_cost,incentive_cost,profit\n";
    for (std::size_t d = 0; d < report.rows.size(); ++d) {
        const uplift::ProfitRow& row = report.rows[d];
        out += std::to_string(d + 1) + ',' + format_double(row.incremental_revenue) + ',' +
               format_double(row.contact_cost) + ',' + format_double(row.incentive_cost) + ',' +
               format_double(row.profit) + '\n';
    }
    return out;
}

/// Writes qini.json, deciles.csv and profit.csv for one scored dataset;
/// returns the qini report for aggregation.
json write_evaluation_reports(const fs::path& dir, const uplift::Vector& scores,
                              const uplift::UpliftDataset& data, const EvaluationOptions& options,
                              const uplift::CostModel& cost) {
    fs::create_directories(dir);
    const uplift::DecileTable table = uplift::decile_table(scores, data, options.bins);
    const uplift::QiniCurve curve =
        uplift::qini_curve(table, options.per_person, options.scaled);
    const json qini = qini_report(curve, options);
    write_json(dir / "qini.json", qini);
    write_text(dir / "deciles.csv", deciles_csv(table, curve));
    write_text(dir / "profit.csv", profit_csv(uplift::profit_by_depth(table, cost)));
    return qini;
}

uplift::Vector load_scores(const std::string& path, uplift::Index expected) {
    std::ifstream in(path);
    if (!in) throw uplift::DataError("cannot open '" + path + "' for reading");
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        try {
            values.push_back(std::stod(line));
        } catch (const std::exception&) {
            if (line_no == 1) continue;  // header row
            throw uplift::DataError(path + ":" + std::to_string(line_no) +
                                    ": cannot parse score '" + line + "'");
        }
    }
    if (static_cast<uplift::Index>(values.size()) != expected) {
        throw uplift::DataError("expected " + std::to_string(expected) + " scores, got " +
                                std::to_string(values.size()));
    }
    return Eigen::Map<const uplift::Vector>(values.data(), static_cast<uplift::Index>(values.size()));
}

struct StrategyEntry {
    std::string name;
    std::vector<uplift::StrategySpec> grid;
};

StrategyEntry parse_strategy_entry(const json& j, std::uint64_t default_seed) {
    StrategyEntry entry;
    try {
        if (j.contains("grid")) {
            for (const json& candidate : j.at("grid")) {
                entry.grid.push_back(uplift::strategy_spec_from_json(candidate));
            }
            if (entry.grid.empty()) throw UsageError("strategy grid is empty");
        } else {
            entry.grid.push_back(uplift::strategy_spec_from_json(j));
        }
    } catch (const uplift::DataError& err) {
        throw UsageError(std::string("invalid strategy config: ") + err.what());
    }
    for (uplift::StrategySpec& spec : entry.grid) {
        if (spec.classifier.ert.seed == 0) spec.classifier.ert.seed = default_seed;
        if (spec.regressor.ert.seed == 0) spec.regressor.ert.seed = default_seed;
        if (spec.smote.seed == 0) spec.smote.seed = default_seed;
    }
    entry.name = j.value("name", entry.grid.front().name());
    return entry;
}

int cmd_generate(const std::string& spec_path, const std::string& out_path, bool no_oracle) {
    uplift::GeneratorSpec spec;
    try {
        spec = load_json_file(spec_path).get<uplift::GeneratorSpec>();
    } catch (const json::exception& err) {
        throw UsageError("invalid generator spec in '" + spec_path + "': " + err.what());
    }
    uplift::UpliftDataset data = uplift::generate(spec);
    if (no_oracle) {
        data = uplift::UpliftDataset(data.covariates(), data.treatment(), data.conversion(),
                                     data.revenue(), data.feature_names());
    }
    uplift::save_csv(data, out_path);
    return 0;
}

int cmd_summarize(const std::string& input, const std::string& out_path) {
    const uplift::UpliftDataset data = uplift::load_csv(input);
    const uplift::UpliftSummary summary = uplift::summarize(data);
    const uplift::SignificanceResult significance = uplift::conversion_significance(summary);
    json j{{"input", input},
           {"n", data.size()},
           {"shares", shares_to_json(uplift::group_shares(data))},
           {"summary", summary_to_json(summary)},
           {"significance",
            json{{"statistic", significance.statistic}, {"p_value", significance.p_value}}}};
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json(out_path, j);
    }
    return 0;
}

int cmd_split(const std::string& input, const std::string& out_dir, double train, double valid,
              double test, std::uint64_t seed) {
    const uplift::UpliftDataset data = uplift::load_csv(input);
    const uplift::SplitSpec spec{train, valid, test, seed};
    const uplift::DatasetSplits splits = uplift::partition(data, spec);
    fs::create_directories(out_dir);
    uplift::save_csv(splits.train, (fs::path(out_dir) / "train.csv").string());
    uplift::save_csv(splits.valid, (fs::path(out_dir) / "valid.csv").string());
    uplift::save_csv(splits.test, (fs::path(out_dir) / "test.csv").string());
    return 0;
}

int cmd_evaluate(const std::string& input, const std::string& scores_path,
                 const std::string& out_dir, const EvaluationOptions& options,
                 const uplift::CostModel& cost) {
    const uplift::UpliftDataset data = uplift::load_csv(input);
    const uplift::Vector scores = load_scores(scores_path, data.size());
    write_evaluation_reports(out_dir, scores, data, options, cost);
    return 0;
}

int cmd_run(const std::string& config_path) {
    const json config = load_json_file(config_path);
    std::string input;
    std::string output_dir;
    std::uint64_t seed = 0;
    uplift::SplitSpec split_spec;
    uplift::CostModel cost;
    EvaluationOptions options;
    std::vector<StrategyEntry> strategies;
    try {
        input = config.at("input").get<std::string>();
        output_dir = config.at("output_dir").get<std::string>();
        seed = config.value("seed", std::uint64_t{0});
        split_spec.seed = seed;
        if (config.contains("split")) {
            const json& s = config.at("split");
            split_spec.train_frac = s.value("train_frac", split_spec.train_frac);
            split_spec.valid_frac = s.value("valid_frac", split_spec.valid_frac);
            split_spec.test_frac = s.value("test_frac", split_spec.test_frac);
            split_spec.seed = s.value("seed", split_spec.seed);
        }
        if (config.contains("cost")) {
            const json& c = config.at("cost");
            cost.rho = c.value("rho", cost.rho);
            cost.epsilon_unit = c.value("epsilon_unit", cost.epsilon_unit);
        }
        if (config.contains("evaluation")) {
            const json& e = config.at("evaluation");
            options.bins = e.value("bins", options.bins);
            options.per_person = e.value("per_person", options.per_person);
            options.scaled = e.value("scaled", options.scaled);
            options.normalized_weighted_qini =
                e.value("normalized_weighted_qini", options.normalized_weighted_qini);
        }
        if (!config.contains("strategies") || config.at("strategies").empty()) {
            throw UsageError("config lists no strategies");
        }
        for (const json& entry : config.at("strategies")) {
            strategies.push_back(parse_strategy_entry(entry, seed));
        }
    } catch (const json::exception& err) {
        throw UsageError(std::string("invalid config: ") + err.what());
    }

    const uplift::UpliftDataset data = uplift::load_csv(input);
    const uplift::DatasetSplits splits = uplift::partition(data, split_spec);
    const uplift::UpliftSummary summary = uplift::summarize(data);
    const uplift::SignificanceResult significance = uplift::conversion_significance(summary);

    const fs::path out_root(output_dir);
    fs::create_directories(out_root);

    json strategy_results = json::object();
    for (const StrategyEntry& entry : strategies) {
        const uplift::SelectionResult selection =
            uplift::select_model(entry.grid, splits.train, splits.valid,
                                 uplift::SelectionMetric::QiniRevenue, options.bins);
        const uplift::Vector scores = uplift::score(selection.model, splits.test);
        const fs::path dir = out_root / entry.name;
        const json qini = write_evaluation_reports(dir, scores, splits.test, options, cost);

        json candidates = json::array();
        for (std::size_t i = 0; i < entry.grid.size(); ++i) {
            const uplift::CandidateResult& candidate = selection.candidates[i];
            json c{{"spec", uplift::to_json(entry.grid[i])}, {"ok", candidate.ok}};
            if (candidate.ok) {
                c["valid_qini"] = candidate.valid_qini;
            } else {
                c["error"] = candidate.error;
            }
            candidates.push_back(std::move(c));
        }
        write_json(dir / "selection.json",
                   json{{"metric", "qini_revenue"},
                        {"bins", options.bins},
                        {"best_index", selection.best_index},
                        {"best", uplift::to_json(selection.best)},
                        {"candidates", std::move(candidates)},
                        {"model", uplift::to_json(selection.model)}});
        strategy_results[entry.name] = json{{"best", uplift::to_json(selection.best)},
                                            {"test_qini", qini.at("qini")},
                                            {"weighted_qini", qini.at("weighted_qini")}};
    }

    write_json(out_root / "summary.json",
               json{{"meta", json{{"created", timestamp_utc()}}},
                    {"input", input},
                    {"n", data.size()},
                    {"seed", seed},
                    {"split",
                     json{{"train", splits.train.size()},
                          {"valid", splits.valid.size()},
                          {"test", splits.test.size()},
                          {"seed", split_spec.seed}}},
                    {"shares", shares_to_json(uplift::group_shares(data))},
                    {"summary", summary_to_json(summary)},
                    {"significance",
                     json{{"statistic", significance.statistic}, {"p_value", significance.p_value}}},
                    {"cost", json{{"rho", cost.rho}, {"epsilon_unit", cost.epsilon_unit}}},
                    {"strategies", std::move(strategy_results)}});
    return 0;
}

json error_json(const std::string& type, const std::string& message) {
    return json{{"error", json{{"type", type}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"revenue uplift modeling toolkit"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "draw a synthetic campaign dataset");
    std::string gen_spec;
    std::string gen_out;
    bool gen_no_oracle = false;
    gen->add_option("--spec", gen_spec, "generator spec JSON")->required();
    gen->add_option("--out", gen_out, "output CSV path")->required();
    gen->add_flag("--no-oracle", gen_no_oracle, "omit the true_uplift column");

    auto* sum = app.add_subcommand("summarize", "descriptive uplift statistics");
    std::string sum_input;
    std::string sum_out;
    sum->add_option("--input", sum_input, "dataset CSV")->required();
    sum->add_option("--out", sum_out, "write JSON here instead of stdout");

    auto* spl = app.add_subcommand("split", "seeded train/valid/test partition");
    std::string spl_input;
    std::string spl_out_dir;
    double spl_train = 0.4;
    double spl_valid = 0.3;
    double spl_test = 0.3;
    std::uint64_t spl_seed = 0;
    spl->add_option("--input", spl_input, "dataset CSV")->required();
    spl->add_option("--out-dir", spl_out_dir, "output directory")->required();
    spl->add_option("--train", spl_train, "training fraction");
    spl->add_option("--valid", spl_valid, "validation fraction");
    spl->add_option("--test", spl_test, "test fraction");
    spl->add_option("--seed", spl_seed, "shuffle seed");

    auto* run = app.add_subcommand("run", "fit, select and evaluate strategies from a config");
    std::string run_config;
    run->add_option("--config", run_config, "run config JSON")->required();

    auto* eva = app.add_subcommand("evaluate", "Qini and profit reports for external scores");
    std::string eva_input;
    std::string eva_scores;
    std::string eva_out_dir;
    EvaluationOptions eva_options;
    uplift::CostModel eva_cost;
    eva->add_option("--input", eva_input, "dataset CSV")->required();
    eva->add_option("--scores", eva_scores, "score file, one value per record")->required();
    eva->add_option("--out-dir", eva_out_dir, "output directory")->required();
    eva->add_option("--bins", eva_options.bins, "number of score bins");
    eva->add_flag("--per-person", eva_options.per_person, "divide curve values by n");
    eva->add_flag("--scaled", eva_options.scaled, "divide the Qini coefficient by n");
    eva->add_flag("--normalized-weighted-qini", eva_options.normalized_weighted_qini,
                  "normalize the weighted Qini by the curve sum");
    eva->add_option("--rho", eva_cost.rho, "relative discount on treated responder revenue");
    eva->add_option("--contact-cost", eva_cost.epsilon_unit, "cost per treated contact");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForAllHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        std::cerr << error_json("usage", err.what()).dump() << '\n';
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_generate(gen_spec, gen_out, gen_no_oracle);
        if (sum->parsed()) return cmd_summarize(sum_input, sum_out);
        if (spl->parsed()) return cmd_split(spl_input, spl_out_dir, spl_train, spl_valid, spl_test,
                                            spl_seed);
        if (run->parsed()) return cmd_run(run_config);
        if (eva->parsed()) return cmd_evaluate(eva_input, eva_scores, eva_out_dir, eva_options,
                                               eva_cost);
        std::cerr << error_json("usage", "no subcommand given").dump() << '\n';
        return 1;
    } catch (const UsageError& err) {
        std::cerr << error_json("usage", err.what()).dump() << '\n';
        return 1;
    } catch (const uplift::FitError& err) {
        std::cerr << error_json("fit", err.what()).dump() << '\n';
        return 3;
    } catch (const uplift::DataError& err) {
        std::cerr << error_json("data", err.what()).dump() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << error_json("internal", err.what()).dump() << '\n';
        return 1;
    }
}
