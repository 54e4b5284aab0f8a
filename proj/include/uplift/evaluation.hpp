#pragma once

#include <vector>

#include "uplift/dataset.hpp"
#include "uplift/types.hpp"

namespace uplift {

/// One score-ordered bin: group counts, conversions, revenue sums and the
/// incremental revenue (mean_T - mean_C) * (n_T + n_C) of Revenue Qini.
struct DecileBin {
    Index n_treatment = 0;
    Index n_control = 0;
    Index conversions_treatment = 0;
    Index conversions_control = 0;
    double revenue_treatment = 0.0;
    double revenue_control = 0.0;
    double mean_revenue_treatment = 0.0;
    double mean_revenue_control = 0.0;
    double incremental_revenue = 0.0;
};

struct DecileTable {
    std::vector<DecileBin> bins;
    Index n = 0;
};

/// cumulative[d] follows the curve through bin d+1; the baseline is the
/// straight line to the curve endpoint.
struct QiniCurve {
    Vector cumulative;
    Vector baseline;
    bool per_person = false;
    bool scaled = false;
    Index n = 0;
};

struct CostModel {
    double rho = 0.0;           // relative discount on treated responder revenue
    double epsilon_unit = 0.0;  // contact cost per treated customer
};

/// Eq.-style profit inputs for one targeted set. Counts are doubles so the
/// per-person form (all set to 1) works directly.
struct ProfitInputs {
    double n_treatment = 0.0;
    double n_control = 0.0;
    double response_treatment = 0.0;  // fraction
    double response_control = 0.0;
    double revenue_per_responder_treatment = 0.0;
    double revenue_per_responder_control = 0.0;
    double contact_cost = 0.0;  // per treated contact
    double rho = 0.0;
    double incentive_base = 0.0;  // sum of treated responder basket values
};

struct ProfitRow {
    double incremental_revenue = 0.0;
    double contact_cost = 0.0;
    double incentive_cost = 0.0;
    double profit = 0.0;  // incremental_revenue - contact_cost - incentive_cost
};

struct ProfitReport {
    std::vector<ProfitRow> rows;  // row d targets bins 1..d+1 cumulatively
};

struct SignificanceResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Sorts by score descending (ties by original index), splits into bins of
/// near-equal size with the first n mod bins one row larger. Every bin must
/// contain both groups.
DecileTable decile_table(VectorRef scores, const UpliftDataset& data, Index bins = 10);

QiniCurve qini_curve(const DecileTable& table, bool per_person = false, bool scaled = false);

/// Discrete area between curve and baseline; the scaled flag divides by n.
double qini_coefficient(const QiniCurve& curve);

/// Weighted sum (1 - d/10) * Q_d over the first nine of exactly ten curve
/// values; the normalized flag divides by the sum of all ten.
double weighted_qini(VectorRef decile_values, bool normalized = false);

/// Incremental revenue with the control side rescaled by N_T/N_C, minus
/// contact costs on treated contacts, minus rho times the incentive base.
ProfitRow campaign_profit(const ProfitInputs& inputs);

/// Cumulative profit per targeting depth from a decile table.
ProfitReport profit_by_depth(const DecileTable& table, const CostModel& cost);

/// Pearson chi-squared on the 2x2 group-by-conversion table, 1 degree of
/// freedom, no continuity correction.
SignificanceResult conversion_significance(const UpliftSummary& summary);

}  // namespace uplift
