#pragma once

#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>

#include <json.hpp>

namespace vrptw {

/// Append-only, line-delimited JSON run log. Every record carries the kind,
/// seconds since the sink was opened, the component id (-1 for run-global
/// records) and a per-component sequence number, so per-component streams
/// are strictly ordered.
class StatsSink {
  public:
    using Clock = std::chrono::steady_clock;

    StatsSink() = default;

    static std::unique_ptr<StatsSink> to_file(const std::string& path) {
        auto sink = std::make_unique<StatsSink>();
        sink->file_.open(path, std::ios::trunc);
        if (!sink->file_.good()) throw std::runtime_error("cannot open stats file " + path);
        sink->out_ = &sink->file_;
        return sink;
    }

    void record(const std::string& kind, int component, nlohmann::json fields) {
        std::lock_guard<std::mutex> lock(mutex_);
        fields["kind"] = kind;
        fields["component"] = component;
        fields["t"] = std::chrono::duration<double>(Clock::now() - start_).count();
        fields["seq"] = seq_[component]++;
        if (out_) *out_ << fields.dump() << '\n';
    }

    void flush() {
        std::lock_guard<std::mutex> lock(mutex_);
        if (out_) out_->flush();
    }

  private:
    std::ofstream file_;
    std::ostream* out_ = nullptr;
    std::mutex mutex_;
    std::map<int, long> seq_;
    Clock::time_point start_ = Clock::now();
};

}  // namespace vrptw
