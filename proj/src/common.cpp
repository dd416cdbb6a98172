#include "curvlab/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace curvlab {

std::string format_point(ConstPoint x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ')';
  return os.str();
}

unsigned worker_count() {
  if (const char* env = std::getenv("CURVLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace curvlab

namespace curvlab {

ParsedId parse_id(const std::string& id) {
  ParsedId out;
  std::size_t pos = id.find(':');
  out.name = id.substr(0, pos);
  if (out.name.empty()) throw ParameterError("empty identifier");
  while (pos != std::string::npos) {
    const std::size_t next = id.find(':', pos + 1);
    const std::string item = id.substr(pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ParameterError("malformed parameter '" + item + "' in '" + id + "'");
    out.params.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    pos = next;
  }
  return out;
}

bool ParsedId::has(const std::string& key) const {
  return std::any_of(params.begin(), params.end(), [&](const auto& kv) { return kv.first == key; });
}

std::string ParsedId::text(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  return fallback;
}

double ParsedId::number(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text(key, "");
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ParameterError("parameter " + key + "='" + v + "' of '" + name + "' is not a number");
  }
}

int ParsedId::integer(const std::string& key, int fallback) const {
  const double d = number(key, fallback);
  if (d != static_cast<int>(d)) throw ParameterError("parameter " + key + " of '" + name + "' must be an integer");
  return static_cast<int>(d);
}

}  // namespace curvlab

namespace curvlab {

std::string Interval::str() const {
  std::ostringstream os;
  os << (lo_closed ? '[' : '(') << lo << ", " << hi << (hi_closed ? ']' : ')');
  return os.str();
}

}  // namespace curvlab
