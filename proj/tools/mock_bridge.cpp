// Echo-last forecaster speaking the bridge line protocol on stdin/stdout.
// Failure modes exist to exercise the client's error handling.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

using nlohmann::json;

namespace {

struct Options {
    bool batch = false;
    std::string fail = "none";
    long long fail_after = 0;
};

json answer(const json &req, long long &served, const Options &opt) {
    if (!req.is_object()) return {{"id", nullptr}, {"error", "request must be an object"}};
    const json id = req.contains("id") && req["id"].is_number_integer() ? req["id"] : json(nullptr);
    if (id.is_null()) return {{"id", nullptr}, {"error", "request has no integer id"}};
    if (!req.contains("series") || !req["series"].is_array()) return {{"id", id}, {"error", "series must be an array"}};
    if (!req.contains("horizon") || !req["horizon"].is_number_integer() || req["horizon"].get<long long>() < 1) {
        return {{"id", id}, {"error", "horizon must be a positive integer"}};
    }
    const auto &series = req["series"];
    if (series.empty()) return {{"id", id}, {"error", "series is empty"}};
    for (const auto &v : series) {
        if (!v.is_number()) return {{"id", id}, {"error", "series holds a non-number"}};
    }

    ++served;
    const bool failing = opt.fail != "none" && served > opt.fail_after;
    const auto horizon = req["horizon"].get<std::size_t>();
    const double last = series.back().get<double>();
    json out{{"id", id}, {"forecast", json::array()}};
    for (std::size_t h = 0; h < horizon; ++h) out["forecast"].push_back(last);
    if (!failing) return out;

    if (opt.fail == "wrong-id") {
        out["id"] = id.get<long long>() + 1000;
    } else if (opt.fail == "short") {
        out["forecast"].erase(out["forecast"].size() - 1);
    } else if (opt.fail == "remote") {
        return {{"id", id}, {"error", "model failure"}};
    }
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    Options opt;
    CLI::App app{"echo-last mock forecaster bridge"};
    app.add_flag("--batch", opt.batch, "advertise batch support");
    app.add_option("--fail", opt.fail, "failure mode")
        ->check(CLI::IsMember({"none", "wrong-id", "garbage", "exit", "hang", "short", "remote", "no-handshake"}));
    app.add_option("--fail-after", opt.fail_after, "requests served normally before failing");
    CLI11_PARSE(app, argc, argv);

    std::ios::sync_with_stdio(false);
    if (opt.fail == "no-handshake") {
        std::cout << "ready" << std::endl;
    } else {
        std::cout << json{{"protocol", 1}, {"batch", opt.batch}}.dump() << std::endl;
    }

    long long served = 0;
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        json req;
        try {
            req = json::parse(line);
        } catch (const json::parse_error &) {
            std::cerr << "mock bridge: unparseable request line\n";
            std::cout << json{{"id", nullptr}, {"error", "malformed request line"}}.dump() << std::endl;
            continue;
        }

        const bool failing_now = opt.fail != "none" && served >= opt.fail_after;
        if (failing_now && opt.fail == "exit") return 3;
        if (failing_now && opt.fail == "hang") {
            while (true) std::this_thread::sleep_for(std::chrono::seconds(60));
        }
        if (failing_now && opt.fail == "garbage") {
            std::cout << "this is not json" << std::endl;
            ++served;
            continue;
        }

        json reply;
        if (req.is_array()) {
            reply = json::array();
            for (const auto &r : req) reply.push_back(answer(r, served, opt));
        } else {
            reply = answer(req, served, opt);
        }
        std::cout << reply.dump() << std::endl;
    }
    return 0;
}
