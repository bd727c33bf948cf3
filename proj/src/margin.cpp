#include "maropt/margin.hpp"

#include <cmath>

#include "maropt/errors.hpp"

namespace maropt::margin {

CallPolicy parse_call_policy(const std::string& name) {
    if (name == "record_only") return CallPolicy::record_only;
    if (name == "liquidate_to_initial") return CallPolicy::liquidate_to_initial;
    raise(Errc::invalid_config,
          "call_policy must be record_only|liquidate_to_initial, got '" + name + "'");
}

std::string call_policy_name(CallPolicy policy) {
    return policy == CallPolicy::record_only ? "record_only" : "liquidate_to_initial";
}

const char* margin_action_name(MarginAction action) {
    switch (action) {
        case MarginAction::call_issued: return "call_issued";
        case MarginAction::liquidated: return "liquidated";
        case MarginAction::exhausted: return "exhausted";
    }
    return "call_issued";
}

void MarginConfig::validate() const {
    if (leverage < 1.0)
        raise(Errc::invalid_config, "leverage must be >= 1");
    if (maintenance_ratio <= 0.0 || maintenance_ratio >= 1.0)
        raise(Errc::invalid_config, "maintenance_ratio must lie in (0, 1)");
    if (annual_loan_rate < 0.0)
        raise(Errc::invalid_config, "annual_loan_rate must be non-negative");
    if (leverage > 1.0 && maintenance_ratio >= 1.0 / leverage)
        raise(Errc::invalid_config,
              "maintenance_ratio " + std::to_string(maintenance_ratio) +
                  " >= 1/leverage; the account would be called on day one");
}

namespace {

constexpr double kEquityFloor = 1e-12;

// Breach test tolerates rounding right at the threshold so a position run
// at exactly max_safe_leverage never flags its own limit.
bool breaches_maintenance(double equity, double position, double maintenance) {
    return equity < maintenance * position * (1.0 - 1e-12);
}

} // namespace

MarginResult simulate_margin(const metrics::EquityCurve& curve,
                             const MarginConfig& config) {
    config.validate();
    if (curve.size() < 2)
        raise(Errc::too_few_points, "margin simulation needs at least 2 points");

    MarginResult result;
    result.equity.dates = curve.dates;
    result.equity.values.resize(curve.size());

    const double capital = curve.values.front();
    double position = config.leverage * capital;
    double loan = position - capital;

    // Anchor for relative tracking; reset whenever forced selling changes
    // the position other than by market moves.
    double anchor_value = curve.values.front();
    double anchor_position = position;

    bool dead = false;
    for (size_t t = 0; t < curve.size(); ++t) {
        if (dead) {
            result.equity.values[t] = kEquityFloor;
            continue;
        }
        if (t > 0) {
            int days = days_between(curve.dates[t - 1], curve.dates[t]);
            loan *= 1.0 + config.annual_loan_rate * days / kDaysPerYear;
        }
        position = anchor_position * (curve.values[t] / anchor_value);
        double equity = position - loan;

        if (equity <= 0.0) {
            result.events.push_back({curve.dates[t], position, equity,
                                     position > 0.0 ? equity / position : 0.0,
                                     MarginAction::exhausted});
            result.equity.values[t] = kEquityFloor;
            dead = true;
            continue;
        }
        if (breaches_maintenance(equity, position, config.maintenance_ratio)) {
            result.events.push_back({curve.dates[t], position, equity,
                                     equity / position, MarginAction::call_issued});
            if (config.call_policy == CallPolicy::liquidate_to_initial) {
                // Sell assets, paying down the loan, until equity/position
                // returns to the initial 1/leverage.
                double target_position = equity * config.leverage;
                double sold = position - target_position;
                position -= sold;
                loan -= sold;
                anchor_value = curve.values[t];
                anchor_position = position;
                result.events.push_back({curve.dates[t], position, equity,
                                         equity / position, MarginAction::liquidated});
            }
        }
        result.equity.values[t] = equity;
    }
    return result;
}

double max_safe_leverage(double max_drawdown, double maintenance_ratio) {
    if (max_drawdown < 0.0 || max_drawdown >= 1.0)
        raise(Errc::invalid_config, "max_drawdown must lie in [0, 1)");
    if (maintenance_ratio <= 0.0 || maintenance_ratio >= 1.0)
        raise(Errc::invalid_config, "maintenance_ratio must lie in (0, 1)");
    return 1.0 / (1.0 - (1.0 - max_drawdown) * (1.0 - maintenance_ratio));
}

} // namespace maropt::margin
