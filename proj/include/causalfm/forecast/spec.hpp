#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace causalfm::forecast {

struct NaiveMean {
    friend bool operator==(const NaiveMean &, const NaiveMean &) = default;
};

struct NaiveLast {
    friend bool operator==(const NaiveLast &, const NaiveLast &) = default;
};

/// Regression of y_t on its previous `window` values plus an intercept.
struct LinReg {
    std::size_t window = 60;
    friend bool operator==(const LinReg &, const LinReg &) = default;
};

struct ArimaOrder {
    std::size_t p = 5;
    std::size_t d = 0;
    std::size_t q = 5;
    friend bool operator==(const ArimaOrder &, const ArimaOrder &) = default;
};

struct Arima {
    ArimaOrder order{};
    friend bool operator==(const Arima &, const Arima &) = default;
};

enum class EtsTrend { None, Additive, Damped };

struct Ets {
    /// nullopt selects the trend by AICc.
    std::optional<EtsTrend> trend;
    friend bool operator==(const Ets &, const Ets &) = default;
};

/// A forecaster living in a child process that speaks the line protocol.
struct External {
    std::string command;
    std::chrono::milliseconds timeout{120'000};
    friend bool operator==(const External &, const External &) = default;
};

using ForecasterSpec = std::variant<NaiveMean, NaiveLast, LinReg, Arima, Ets, External>;

/// Throws InvalidArgument for out-of-range hyperparameters.
void validate(const ForecasterSpec &spec);

/// Shortest history fit_predict accepts for this spec.
std::size_t min_history(const ForecasterSpec &spec);

/// Stable text form, also accepted by parse_forecaster:
/// naive_mean, naive_last, linreg:W, arima:P,D,Q, ets:auto|none|additive|damped, external.
std::string to_string(const ForecasterSpec &spec);

/// Parses the text form. "linreg", "arima" and "ets" alone take the defaults
/// (window 60, order 5,0,5, auto trend). "external" needs a command supplied
/// separately (see with_bridge_command).
ForecasterSpec parse_forecaster(std::string_view text);

/// Fills the command of an External spec; other specs are returned unchanged.
ForecasterSpec with_bridge_command(ForecasterSpec spec, const std::string &command);

std::string_view to_string(EtsTrend trend);

}  // namespace causalfm::forecast
