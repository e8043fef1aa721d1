#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <sys/types.h>

#include "causalfm/core/error.hpp"
#include "causalfm/forecast/spec.hpp"

namespace causalfm::forecast {

// Forecaster wire protocol, one JSON document per line over the child's
// stdin/stdout:
//   handshake (child, first line): {"protocol": 1, "batch": bool}
//   request:  {"id": int, "series": [real...], "horizon": int, "covariates": [[real...]...]?}
//   response: {"id": int, "forecast": [real...]}  or  {"id": int, "error": string}
// A batch-capable child also accepts a JSON array of requests on one line and
// answers with a JSON array of responses in the same order.

inline constexpr int kProtocolVersion = 1;

class BridgeError : public Error {
public:
    using Error::Error;
};

/// Rejected before anything was sent (e.g. horizon 0, empty series).
class ProtocolError : public BridgeError {
public:
    using BridgeError::BridgeError;
};

class BridgeTimeout : public BridgeError {
public:
    using BridgeError::BridgeError;
};

/// Unparseable line, wrong id, wrong forecast length, non-finite values.
class MalformedResponse : public BridgeError {
public:
    using BridgeError::BridgeError;
};

/// The child closed its output or exited.
class BridgeExited : public BridgeError {
public:
    BridgeExited(const std::string &what, int exit_code) : BridgeError(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

/// The child answered with {"id", "error"}.
class RemoteForecastError : public BridgeError {
public:
    using BridgeError::BridgeError;
};

struct BridgeRequest {
    std::span<const double> series;
    std::size_t horizon = 1;
    /// Optional time-varying covariates, one vector per covariate.
    std::vector<std::vector<double>> covariates;
};

/// A running bridge process. Move-only; the destructor closes the child's
/// input and reaps it (killing it if it does not exit promptly). One request
/// is in flight at a time.
class ExternalHandle {
public:
    static ExternalHandle launch(const std::string &command,
                                 std::chrono::milliseconds timeout = std::chrono::milliseconds{120'000});

    ExternalHandle(ExternalHandle &&other) noexcept;
    ExternalHandle &operator=(ExternalHandle &&other) noexcept;
    ExternalHandle(const ExternalHandle &) = delete;
    ExternalHandle &operator=(const ExternalHandle &) = delete;
    ~ExternalHandle();

    bool supports_batch() const noexcept { return batch_; }
    pid_t pid() const noexcept { return pid_; }

    std::vector<double> forecast(const BridgeRequest &request);

    /// Sends all requests as one array line when the child advertised batch
    /// support, otherwise one at a time.
    std::vector<std::vector<double>> forecast_batch(std::span<const BridgeRequest> requests);

private:
    ExternalHandle() = default;

    void send_line(const std::string &line);
    std::string read_line();
    [[noreturn]] void raise_exited(const std::string &context);
    void shutdown() noexcept;

    pid_t pid_ = -1;
    pid_t pgid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    bool batch_ = false;
    std::chrono::milliseconds timeout_{120'000};
    long long next_id_ = 1;
    std::string buffer_;
};

/// Fixed-size pool of bridge processes, launched lazily. acquire() blocks
/// until a handle is free.
class BridgePool {
public:
    class Lease {
    public:
        Lease(BridgePool &pool, std::unique_ptr<ExternalHandle> handle)
            : pool_(&pool), handle_(std::move(handle)) {}
        Lease(Lease &&) noexcept = default;
        Lease &operator=(Lease &&) = delete;
        ~Lease();

        ExternalHandle &operator*() { return *handle_; }
        ExternalHandle *operator->() { return handle_.get(); }

        /// Drops the handle instead of returning it (used after protocol failures).
        void discard() noexcept;

    private:
        BridgePool *pool_;
        std::unique_ptr<ExternalHandle> handle_;
    };

    BridgePool(External params, std::size_t size);

    Lease acquire();
    const External &params() const noexcept { return params_; }

private:
    void release(std::unique_ptr<ExternalHandle> handle) noexcept;
    void forget() noexcept;

    External params_;
    std::size_t size_;
    std::size_t live_ = 0;
    std::vector<std::unique_ptr<ExternalHandle>> idle_;
    std::mutex mutex_;
    std::condition_variable available_;
};

}  // namespace causalfm::forecast
