#include "zlab/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

namespace zlab {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyOrFullSet: return "EmptyOrFullSet";
    case ErrorCode::ScaleRangeTooNarrow: return "ScaleRangeTooNarrow";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::InvalidRatio: return "InvalidRatio";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::UnsupportedSpace: return "UnsupportedSpace";
    case ErrorCode::ScaleUnresolvable: return "ScaleUnresolvable";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::UnresolvedSingularity: return "UnresolvedSingularity";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NotStepFunction: return "NotStepFunction";
    case ErrorCode::BudgetViolation: return "BudgetViolation";
    case ErrorCode::NotCarleson: return "NotCarleson";
    case ErrorCode::NoSingularFrequency: return "NoSingularFrequency";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::AuditFailure: return "AuditFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {
std::atomic<unsigned> g_threads{0};
thread_local bool t_inside_worker = false;
}

void set_thread_count(unsigned k) { g_threads = k; }

unsigned thread_count() {
  unsigned k = g_threads.load();
  if (k == 0) k = std::max(1u, std::thread::hardware_concurrency());
  return k;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1 || t_inside_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      t_inside_worker = true;
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("ZLAB_LOG");
    if (!env) return LogLevel::Quiet;
    if (!std::strcmp(env, "debug") || !std::strcmp(env, "2")) return LogLevel::Debug;
    if (!std::strcmp(env, "info") || !std::strcmp(env, "1")) return LogLevel::Info;
    return LogLevel::Quiet;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::fprintf(stderr, "[zlab] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::fprintf(stderr, "[zlab:debug] %s\n", msg.c_str());
}

const char* version() { return ZLAB_VERSION_STRING; }

bool is_power_of_two(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace zlab
