#pragma once

#include <string>
#include <vector>

#include "maropt/metrics.hpp"

namespace maropt::margin {

enum class CallPolicy { record_only, liquidate_to_initial };

CallPolicy parse_call_policy(const std::string& name);
std::string call_policy_name(CallPolicy policy);

struct MarginConfig {
    double leverage = 1.0;            // position value / own capital at start
    double maintenance_ratio = 0.25;  // minimum equity / position value
    double annual_loan_rate = 0.0;    // act/365.25 accrual on the loan
    CallPolicy call_policy = CallPolicy::record_only;

    // Throws InvalidConfig; in particular maintenance_ratio must leave the
    // starting ratio 1/leverage above water.
    void validate() const;
};

enum class MarginAction { call_issued, liquidated, exhausted };

const char* margin_action_name(MarginAction action);

struct MarginEvent {
    Date date;
    double position_value = 0.0;
    double equity = 0.0;
    double equity_ratio = 0.0;
    MarginAction action = MarginAction::call_issued;
};

struct MarginResult {
    metrics::EquityCurve equity;       // investor equity per date
    std::vector<MarginEvent> events;   // ordered by date
};

// Runs a leveraged position over the unlevered curve: the position tracks
// the curve's relative moves, the loan accrues daily interest, and equity
// breaching the maintenance ratio raises events (with optional forced
// selling back to the initial ratio). Equity at or below zero emits
// `exhausted` once and pins the curve to a 1e-12 sentinel afterwards.
MarginResult simulate_margin(const metrics::EquityCurve& curve,
                             const MarginConfig& config);

// Largest leverage that survives a peak-to-trough drop of `max_drawdown`
// without breaching `maintenance_ratio` (zero-interest approximation):
// 1 / (1 - (1 - mdd) * (1 - m)).
double max_safe_leverage(double max_drawdown, double maintenance_ratio);

} // namespace maropt::margin
