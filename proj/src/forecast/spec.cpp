#include "causalfm/forecast/spec.hpp"

#include <charconv>
#include <sstream>

#include "causalfm/core/csv.hpp"
#include "causalfm/core/error.hpp"

namespace causalfm::forecast {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::size_t parse_count(std::string_view text, std::string_view what) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidArgument("invalid " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::string_view to_string(EtsTrend trend) {
    switch (trend) {
    case EtsTrend::None: return "none";
    case EtsTrend::Additive: return "additive";
    case EtsTrend::Damped: return "damped";
    }
    return "none";
}

void validate(const ForecasterSpec &spec) {
    std::visit(overloaded{
                   [](const LinReg &s) {
                       if (s.window < 1) throw InvalidArgument("linreg: window must be >= 1");
                   },
                   [](const Arima &s) {
                       if (s.order.d > 1) throw InvalidArgument("arima: d must be 0 or 1");
                   },
                   [](const External &s) {
                       if (s.timeout.count() <= 0) throw InvalidArgument("external: timeout must be positive");
                   },
                   [](const auto &) {},
               },
               spec);
}

std::size_t min_history(const ForecasterSpec &spec) {
    return std::visit(overloaded{
                          [](const NaiveMean &) -> std::size_t { return 1; },
                          [](const NaiveLast &) -> std::size_t { return 1; },
                          [](const LinReg &s) -> std::size_t { return s.window + 1; },
                          [](const Arima &s) -> std::size_t { return s.order.p + s.order.q + 2 + s.order.d; },
                          [](const Ets &) -> std::size_t { return 3; },
                          [](const External &) -> std::size_t { return 1; },
                      },
                      spec);
}

std::string to_string(const ForecasterSpec &spec) {
    return std::visit(overloaded{
                          [](const NaiveMean &) -> std::string { return "naive_mean"; },
                          [](const NaiveLast &) -> std::string { return "naive_last"; },
                          [](const LinReg &s) -> std::string { return "linreg:" + std::to_string(s.window); },
                          [](const Arima &s) -> std::string {
                              std::ostringstream os;
                              os << "arima:" << s.order.p << ',' << s.order.d << ',' << s.order.q;
                              return os.str();
                          },
                          [](const Ets &s) -> std::string {
                              return "ets:" + std::string(s.trend ? to_string(*s.trend) : "auto");
                          },
                          [](const External &) -> std::string { return "external"; },
                      },
                      spec);
}

ForecasterSpec parse_forecaster(std::string_view text) {
    const auto colon = text.find(':');
    const auto kind = text.substr(0, colon);
    const auto args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    const bool has_args = colon != std::string_view::npos;

    ForecasterSpec spec;
    if (kind == "naive_mean" && !has_args) {
        spec = NaiveMean{};
    } else if (kind == "naive_last" && !has_args) {
        spec = NaiveLast{};
    } else if (kind == "linreg") {
        spec = has_args ? LinReg{parse_count(args, "linreg window")} : LinReg{};
    } else if (kind == "arima") {
        Arima a;
        if (has_args) {
            const auto parts = split_csv_line(args);
            if (parts.size() != 3) throw InvalidArgument("arima expects P,D,Q, got '" + std::string(args) + "'");
            a.order = {parse_count(parts[0], "arima p"), parse_count(parts[1], "arima d"),
                       parse_count(parts[2], "arima q")};
        }
        spec = a;
    } else if (kind == "ets") {
        Ets e;
        if (!has_args || args == "auto") {
            e.trend = std::nullopt;
        } else if (args == "none") {
            e.trend = EtsTrend::None;
        } else if (args == "additive") {
            e.trend = EtsTrend::Additive;
        } else if (args == "damped") {
            e.trend = EtsTrend::Damped;
        } else {
            throw InvalidArgument("unknown ets trend '" + std::string(args) + "'");
        }
        spec = e;
    } else if (kind == "external" && !has_args) {
        spec = External{};
    } else {
        throw InvalidArgument("unknown forecaster '" + std::string(text) + "'");
    }
    validate(spec);
    return spec;
}

ForecasterSpec with_bridge_command(ForecasterSpec spec, const std::string &command) {
    if (auto *ext = std::get_if<External>(&spec)) {
        ext->command = command;
    }
    return spec;
}

}  // namespace causalfm::forecast
