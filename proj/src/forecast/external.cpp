#include "causalfm/forecast/external.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace causalfm::forecast {

namespace {

using json = nlohmann::json;

constexpr auto kReapGrace = std::chrono::milliseconds{2000};

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

json request_json(long long id, const BridgeRequest &request) {
    json j;
    j["id"] = id;
    j["series"] = std::vector<double>(request.series.begin(), request.series.end());
    j["horizon"] = request.horizon;
    if (!request.covariates.empty()) j["covariates"] = request.covariates;
    return j;
}

void check_request(const BridgeRequest &request) {
    if (request.horizon == 0) throw ProtocolError("bridge request: horizon must be >= 1");
    if (request.series.empty()) throw ProtocolError("bridge request: series is empty");
    for (const double v : request.series) {
        if (!std::isfinite(v)) throw ProtocolError("bridge request: series has a non-finite value");
    }
}

std::vector<double> decode_response(const json &j, long long expected_id, std::size_t horizon) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer()) {
        throw MalformedResponse("bridge response lacks an integer id: " + j.dump());
    }
    const auto id = j["id"].get<long long>();
    if (id != expected_id) {
        throw MalformedResponse("bridge response id " + std::to_string(id) + " does not match request id " +
                                std::to_string(expected_id));
    }
    if (j.contains("error")) {
        throw RemoteForecastError("bridge reported an error for request " + std::to_string(id) + ": " +
                                  (j["error"].is_string() ? j["error"].get<std::string>() : j["error"].dump()));
    }
    if (!j.contains("forecast") || !j["forecast"].is_array()) {
        throw MalformedResponse("bridge response lacks a forecast array: " + j.dump());
    }
    const auto &arr = j["forecast"];
    if (arr.size() != horizon) {
        throw MalformedResponse("bridge returned " + std::to_string(arr.size()) + " values for horizon " +
                                std::to_string(horizon));
    }
    std::vector<double> out;
    out.reserve(horizon);
    for (const auto &v : arr) {
        if (!v.is_number()) throw MalformedResponse("bridge forecast contains a non-number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw MalformedResponse("bridge forecast contains a non-finite value");
        out.push_back(d);
    }
    return out;
}

json parse_line(const std::string &line) {
    try {
        return json::parse(line);
    } catch (const json::parse_error &e) {
        throw MalformedResponse("bridge wrote a line that is not JSON: '" + line.substr(0, 200) + "'");
    }
}

}  // namespace

ExternalHandle ExternalHandle::launch(const std::string &command, std::chrono::milliseconds timeout) {
    if (command.empty()) throw InvalidArgument("bridge command is empty");
    ignore_sigpipe_once();

    int in_pipe[2];
    int out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0) throw BridgeError(std::string("pipe: ") + std::strerror(errno));
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        throw BridgeError(std::string("pipe: ") + std::strerror(errno));
    }

    const pid_t pid = fork();
    if (pid < 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) close(fd);
        throw BridgeError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        setpgid(0, 0);
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);

    ExternalHandle h;
    setpgid(pid, pid);
    h.pid_ = pid;
    h.pgid_ = pid;
    h.to_child_ = in_pipe[1];
    h.from_child_ = out_pipe[0];
    h.timeout_ = timeout;

    const json hello = parse_line(h.read_line());
    if (!hello.is_object() || !hello.contains("protocol") || !hello["protocol"].is_number_integer()) {
        throw MalformedResponse("bridge handshake is missing the protocol field: " + hello.dump());
    }
    if (hello["protocol"].get<int>() != kProtocolVersion) {
        throw MalformedResponse("bridge speaks protocol " + hello["protocol"].dump() + ", expected " +
                                std::to_string(kProtocolVersion));
    }
    h.batch_ = hello.contains("batch") && hello["batch"].is_boolean() && hello["batch"].get<bool>();
    return h;
}

ExternalHandle::ExternalHandle(ExternalHandle &&other) noexcept
    : pid_(std::exchange(other.pid_, -1)),
      pgid_(std::exchange(other.pgid_, -1)),
      to_child_(std::exchange(other.to_child_, -1)),
      from_child_(std::exchange(other.from_child_, -1)),
      batch_(other.batch_),
      timeout_(other.timeout_),
      next_id_(other.next_id_),
      buffer_(std::move(other.buffer_)) {}

ExternalHandle &ExternalHandle::operator=(ExternalHandle &&other) noexcept {
    if (this != &other) {
        shutdown();
        pid_ = std::exchange(other.pid_, -1);
        pgid_ = std::exchange(other.pgid_, -1);
        to_child_ = std::exchange(other.to_child_, -1);
        from_child_ = std::exchange(other.from_child_, -1);
        batch_ = other.batch_;
        timeout_ = other.timeout_;
        next_id_ = other.next_id_;
        buffer_ = std::move(other.buffer_);
    }
    return *this;
}

ExternalHandle::~ExternalHandle() { shutdown(); }

void ExternalHandle::shutdown() noexcept {
    if (to_child_ >= 0) close(std::exchange(to_child_, -1));
    if (from_child_ >= 0) close(std::exchange(from_child_, -1));
    if (pid_ > 0) {
        const auto deadline = std::chrono::steady_clock::now() + kReapGrace;
        int status = 0;
        while (waitpid(pid_, &status, WNOHANG) == 0) {
            if (std::chrono::steady_clock::now() > deadline) {
                kill(-pgid_, SIGKILL);
                waitpid(pid_, &status, 0);
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds{5});
        }
        pid_ = -1;
    }
    if (pgid_ > 0) kill(-std::exchange(pgid_, -1), SIGKILL);
}

void ExternalHandle::raise_exited(const std::string &context) {
    int status = 0;
    int code = -1;
    // Give the child a moment to finish exiting so the status is meaningful.
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds{500};
    pid_t r = 0;
    while ((r = waitpid(pid_, &status, WNOHANG)) == 0 && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds{2});
    }
    if (r == pid_) {
        code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
        pid_ = -1;
    }
    throw BridgeExited("bridge process exited " + context +
                           (code >= 0 ? " with status " + std::to_string(code) : std::string{}),
                       code);
}

void ExternalHandle::send_line(const std::string &line) {
    if (to_child_ < 0) throw BridgeError("bridge handle is closed");
    std::string payload = line;
    payload.push_back('\n');
    std::size_t off = 0;
    while (off < payload.size()) {
        const ssize_t n = write(to_child_, payload.data() + off, payload.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == EPIPE) raise_exited("before accepting a request");
            throw BridgeError(std::string("write to bridge: ") + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
}

std::string ExternalHandle::read_line() {
    if (from_child_ < 0) throw BridgeError("bridge handle is closed");
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        const auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            throw BridgeTimeout("bridge did not answer within " + std::to_string(timeout_.count()) + " ms");
        }
        pollfd pfd{from_child_, POLLIN, 0};
        const int ready = poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1'000'000)));
        if (ready < 0) {
            if (errno == EINTR) continue;
            throw BridgeError(std::string("poll on bridge output: ") + std::strerror(errno));
        }
        if (ready == 0) continue;
        char chunk[65536];
        const ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw BridgeError(std::string("read from bridge: ") + std::strerror(errno));
        }
        if (n == 0) raise_exited("before completing a response line");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::vector<double> ExternalHandle::forecast(const BridgeRequest &request) {
    check_request(request);
    const long long id = next_id_++;
    send_line(request_json(id, request).dump());
    return decode_response(parse_line(read_line()), id, request.horizon);
}

std::vector<std::vector<double>> ExternalHandle::forecast_batch(std::span<const BridgeRequest> requests) {
    for (const auto &r : requests) check_request(r);
    std::vector<std::vector<double>> out;
    out.reserve(requests.size());
    if (!batch_ || requests.size() <= 1) {
        for (const auto &r : requests) out.push_back(forecast(r));
        return out;
    }

    json arr = json::array();
    std::vector<long long> ids;
    ids.reserve(requests.size());
    for (const auto &r : requests) {
        ids.push_back(next_id_++);
        arr.push_back(request_json(ids.back(), r));
    }
    send_line(arr.dump());
    const json reply = parse_line(read_line());
    if (!reply.is_array() || reply.size() != requests.size()) {
        throw MalformedResponse("bridge batch reply must be an array of " + std::to_string(requests.size()) +
                                " responses");
    }
    for (std::size_t i = 0; i < requests.size(); ++i) {
        out.push_back(decode_response(reply[i], ids[i], requests[i].horizon));
    }
    return out;
}

BridgePool::Lease::~Lease() {
    if (handle_) pool_->release(std::move(handle_));
}

void BridgePool::Lease::discard() noexcept {
    if (handle_) {
        handle_.reset();
        pool_->forget();
    }
}

BridgePool::BridgePool(External params, std::size_t size) : params_(std::move(params)), size_(size) {
    if (size_ == 0) throw InvalidArgument("bridge pool size must be >= 1");
    if (params_.command.empty()) throw InvalidArgument("bridge pool needs a launch command");
}

BridgePool::Lease BridgePool::acquire() {
    std::unique_lock lock(mutex_);
    available_.wait(lock, [&] { return !idle_.empty() || live_ < size_; });
    if (!idle_.empty()) {
        auto h = std::move(idle_.back());
        idle_.pop_back();
        return Lease(*this, std::move(h));
    }
    ++live_;
    lock.unlock();
    try {
        auto h = std::make_unique<ExternalHandle>(ExternalHandle::launch(params_.command, params_.timeout));
        return Lease(*this, std::move(h));
    } catch (...) {
        lock.lock();
        --live_;
        available_.notify_one();
        throw;
    }
}

void BridgePool::release(std::unique_ptr<ExternalHandle> handle) noexcept {
    std::lock_guard lock(mutex_);
    idle_.push_back(std::move(handle));
    available_.notify_one();
}

void BridgePool::forget() noexcept {
    std::lock_guard lock(mutex_);
    --live_;
    available_.notify_one();
}

}  // namespace causalfm::forecast
