#include "uplift/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace uplift {

DecileTable decile_table(VectorRef scores, const UpliftDataset& data, Index bins) {
    const Index n = data.size();
    if (scores.size() != n) throw DataError("scores length does not match dataset size");
    if (!scores.allFinite()) throw DataError("scores must be finite");
    if (bins < 2) throw DataError("decile table needs at least 2 bins");
    if (bins > n) throw DataError("more bins than records");

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    DecileTable table;
    table.n = n;
    table.bins.resize(static_cast<std::size_t>(bins));
    const Index base = n / bins;
    const Index larger = n % bins;
    Index cursor = 0;
    for (Index d = 0; d < bins; ++d) {
        DecileBin& bin = table.bins[static_cast<std::size_t>(d)];
        const Index size = base + (d < larger ? 1 : 0);
        for (Index k = 0; k < size; ++k) {
            const Index row = order[static_cast<std::size_t>(cursor++)];
            if (data.treatment()[row] == 1) {
                ++bin.n_treatment;
                bin.conversions_treatment += data.conversion()[row];
                bin.revenue_treatment += data.revenue()[row];
            } else {
                ++bin.n_control;
                bin.conversions_control += data.conversion()[row];
                bin.revenue_control += data.revenue()[row];
            }
        }
        if (bin.n_treatment == 0 || bin.n_control == 0) {
            throw DataError("bin " + std::to_string(d + 1) + " of " + std::to_string(bins) +
                            " lacks a treatment or control record; use fewer bins");
        }
        bin.mean_revenue_treatment = bin.revenue_treatment / static_cast<double>(bin.n_treatment);
        bin.mean_revenue_control = bin.revenue_control / static_cast<double>(bin.n_control);
        bin.incremental_revenue = (bin.mean_revenue_treatment - bin.mean_revenue_control) *
                                  static_cast<double>(bin.n_treatment + bin.n_control);
    }
    return table;
}

QiniCurve qini_curve(const DecileTable& table, bool per_person, bool scaled) {
    const auto bins = static_cast<Index>(table.bins.size());
    if (bins == 0) throw DataError("qini curve needs a non-empty decile table");
    QiniCurve curve;
    curve.per_person = per_person;
    curve.scaled = scaled;
    curve.n = table.n;
    curve.cumulative.resize(bins);
    double running = 0.0;
    for (Index d = 0; d < bins; ++d) {
        running += table.bins[static_cast<std::size_t>(d)].incremental_revenue;
        curve.cumulative[d] = running;
    }
    curve.baseline.resize(bins);
    for (Index d = 0; d < bins; ++d) {
        curve.baseline[d] = running * static_cast<double>(d + 1) / static_cast<double>(bins);
    }
    if (per_person) {
        curve.cumulative /= static_cast<double>(table.n);
        curve.baseline /= static_cast<double>(table.n);
    }
    return curve;
}

double qini_coefficient(const QiniCurve& curve) {
    double q = (curve.cumulative - curve.baseline).sum();
    if (curve.scaled) q /= static_cast<double>(curve.n);
    return q;
}

double weighted_qini(VectorRef decile_values, bool normalized) {
    if (decile_values.size() != 10) {
        throw DataError("weighted qini needs exactly 10 decile values, got " +
                        std::to_string(decile_values.size()));
    }
    double numerator = 0.0;
    for (Index d = 1; d <= 9; ++d) {
        numerator += (1.0 - static_cast<double>(d) / 10.0) * decile_values[d - 1];
    }
    if (!normalized) return numerator;
    const double denominator = decile_values.sum();
    if (denominator == 0.0) throw DataError("weighted qini denominator is zero");
    return numerator / denominator;
}

ProfitRow campaign_profit(const ProfitInputs& inputs) {
    if (inputs.rho < 0.0 || inputs.rho >= 1.0) throw DataError("rho must lie in [0,1)");
    if (inputs.contact_cost < 0.0) throw DataError("contact cost must be non-negative");
    for (double fraction : {inputs.response_treatment, inputs.response_control}) {
        if (fraction < 0.0 || fraction > 1.0) throw DataError("response fractions must lie in [0,1]");
    }
    for (double value : {inputs.revenue_per_responder_treatment,
                         inputs.revenue_per_responder_control, inputs.n_treatment,
                         inputs.n_control, inputs.incentive_base}) {
        if (value < 0.0) throw DataError("profit inputs must be non-negative");
    }
    const double treated_revenue =
        inputs.n_treatment * inputs.response_treatment * inputs.revenue_per_responder_treatment;
    const double control_revenue =
        inputs.n_control * inputs.response_control * inputs.revenue_per_responder_control;
    const double scale = inputs.n_control > 0.0 ? inputs.n_treatment / inputs.n_control : 0.0;
    ProfitRow row;
    row.incremental_revenue = treated_revenue - scale * control_revenue;
    row.contact_cost = inputs.n_treatment * inputs.contact_cost;
    row.incentive_cost = inputs.rho * inputs.incentive_base;
    row.profit = row.incremental_revenue - row.contact_cost - row.incentive_cost;
    return row;
}

ProfitReport profit_by_depth(const DecileTable& table, const CostModel& cost) {
    ProfitReport report;
    double n_treatment = 0.0;
    double n_control = 0.0;
    double conversions_treatment = 0.0;
    double conversions_control = 0.0;
    double revenue_treatment = 0.0;
    double revenue_control = 0.0;
    for (const DecileBin& bin : table.bins) {
        n_treatment += static_cast<double>(bin.n_treatment);
        n_control += static_cast<double>(bin.n_control);
        conversions_treatment += static_cast<double>(bin.conversions_treatment);
        conversions_control += static_cast<double>(bin.conversions_control);
        revenue_treatment += bin.revenue_treatment;
        revenue_control += bin.revenue_control;
        ProfitInputs inputs;
        inputs.n_treatment = n_treatment;
        inputs.n_control = n_control;
        inputs.response_treatment = conversions_treatment / n_treatment;
        inputs.response_control = conversions_control / n_control;
        inputs.revenue_per_responder_treatment =
            conversions_treatment > 0.0 ? revenue_treatment / conversions_treatment : 0.0;
        inputs.revenue_per_responder_control =
            conversions_control > 0.0 ? revenue_control / conversions_control : 0.0;
        inputs.contact_cost = cost.epsilon_unit;
        inputs.rho = cost.rho;
        inputs.incentive_base = revenue_treatment;
        report.rows.push_back(campaign_profit(inputs));
    }
    return report;
}

SignificanceResult conversion_significance(const UpliftSummary& summary) {
    const double a = static_cast<double>(summary.treatment.purchasers);
    const double b = static_cast<double>(summary.treatment.sessions - summary.treatment.purchasers);
    const double c = static_cast<double>(summary.control.purchasers);
    const double d = static_cast<double>(summary.control.sessions - summary.control.purchasers);
    const double row1 = a + b;
    const double row2 = c + d;
    const double col1 = a + c;
    const double col2 = b + d;
    if (row1 <= 0.0 || row2 <= 0.0 || col1 <= 0.0 || col2 <= 0.0) {
        throw DataError("chi-squared test needs positive marginals");
    }
    const double n = row1 + row2;
    const double diff = a * d - b * c;
    SignificanceResult result;
    result.statistic = n * diff * diff / (row1 * row2 * col1 * col2);
    // Survival function of chi-squared with 1 dof.
    result.p_value = std::erfc(std::sqrt(result.statistic / 2.0));
    return result;
}

}  // namespace uplift
