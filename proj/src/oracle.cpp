#include "gcq/oracle.hpp"

#include <json.hpp>

namespace gcq {

std::set<Thread> ScriptOracle::available(std::size_t step, const SessionKey&, const std::set<Thread>& c) const {
  if (steps_.empty()) return c;
  const auto& now = steps_[std::min(step, steps_.size() - 1)];
  std::set<Thread> out;
  for (const auto& t : c)
    if (now.count(t.str())) out.insert(t);
  return out;
}

std::string ScriptOracle::describe() const { return "script(" + std::to_string(steps_.size()) + " steps)"; }

std::set<Thread> WithholdOracle::available(std::size_t step, const SessionKey&, const std::set<Thread>& c) const {
  std::set<Thread> out = c;
  if (step >= from_) out.erase(Thread(thread_));
  return out;
}

std::string WithholdOracle::describe() const {
  return "withhold(" + thread_ + " from step " + std::to_string(from_) + ")";
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::set<Thread> BernoulliOracle::available(std::size_t step, const SessionKey&, const std::set<Thread>& c) const {
  std::set<Thread> out;
  for (const auto& t : c) {
    auto h = splitmix(seed_ ^ splitmix(step) ^ fnv1a(t.str()));
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (u < p_) out.insert(t);
  }
  return out;
}

std::string BernoulliOracle::describe() const {
  return "bernoulli(p=" + std::to_string(p_) + ", seed=" + std::to_string(seed_) + ")";
}

OraclePtr load_schedule(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ScheduleError(std::string("schedule is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("mode") || !j["mode"].is_string())
    throw ScheduleError("schedule needs a string field \"mode\"");
  auto mode = j["mode"].get<std::string>();
  if (mode == "script") {
    if (!j.contains("steps") || !j["steps"].is_array()) throw ScheduleError("script schedule needs \"steps\"");
    std::vector<std::set<std::string>> steps;
    for (const auto& s : j["steps"]) {
      if (!s.is_object() || !s.contains("available") || !s["available"].is_array())
        throw ScheduleError("each step needs an \"available\" array");
      std::set<std::string> av;
      for (const auto& t : s["available"]) {
        if (!t.is_string()) throw ScheduleError("thread names must be strings");
        av.insert(t.get<std::string>());
      }
      steps.push_back(std::move(av));
    }
    return std::make_shared<ScriptOracle>(std::move(steps));
  }
  if (mode == "bernoulli") {
    if (!j.contains("p") || !j["p"].is_number()) throw ScheduleError("bernoulli schedule needs \"p\"");
    double p = j["p"].get<double>();
    if (p < 0 || p > 1) throw ScheduleError("\"p\" must lie in [0,1]");
    std::uint64_t seed = 0;
    if (j.contains("seed")) {
      if (!j["seed"].is_number_unsigned()) throw ScheduleError("\"seed\" must be a non-negative integer");
      seed = j["seed"].get<std::uint64_t>();
    }
    return std::make_shared<BernoulliOracle>(p, seed);
  }
  throw ScheduleError("unknown schedule mode \"" + mode + "\"");
}

std::vector<OraclePtr> single_failure_family(const std::set<Thread>& threads, std::size_t steps) {
  std::vector<OraclePtr> out{std::make_shared<AllAvailable>()};
  for (const auto& t : threads)
    for (std::size_t s = 0; s < steps; ++s) out.push_back(std::make_shared<WithholdOracle>(t.str(), s));
  return out;
}

}  // namespace gcq
