#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gcq/names.hpp"

namespace gcq {

// Which of the candidate threads may take part in a collective step.
class AvailabilityOracle {
 public:
  virtual ~AvailabilityOracle() = default;
  virtual std::set<Thread> available(std::size_t step, const SessionKey& k,
                                     const std::set<Thread>& candidates) const = 0;
  // First step index from which the answers no longer depend on the step.
  virtual std::optional<std::size_t> horizon() const { return std::nullopt; }
  virtual std::string describe() const = 0;
};

using OraclePtr = std::shared_ptr<const AvailabilityOracle>;

class AllAvailable final : public AvailabilityOracle {
 public:
  std::set<Thread> available(std::size_t, const SessionKey&, const std::set<Thread>& c) const override { return c; }
  std::optional<std::size_t> horizon() const override { return 0; }
  std::string describe() const override { return "all-available"; }
};

// steps[i] lists the threads available at step i; the last entry repeats.
class ScriptOracle final : public AvailabilityOracle {
 public:
  explicit ScriptOracle(std::vector<std::set<std::string>> steps) : steps_(std::move(steps)) {}
  std::set<Thread> available(std::size_t step, const SessionKey&, const std::set<Thread>& c) const override;
  std::optional<std::size_t> horizon() const override { return steps_.empty() ? 0 : steps_.size() - 1; }
  std::string describe() const override;

 private:
  std::vector<std::set<std::string>> steps_;
};

// A thread is withheld from step `from` onwards; everyone else is available.
class WithholdOracle final : public AvailabilityOracle {
 public:
  WithholdOracle(std::string thread, std::size_t from) : thread_(std::move(thread)), from_(from) {}
  std::set<Thread> available(std::size_t step, const SessionKey&, const std::set<Thread>& c) const override;
  std::optional<std::size_t> horizon() const override { return from_; }
  std::string describe() const override;

 private:
  std::string thread_;
  std::size_t from_;
};

// Independent coin per (step, thread), stateless so replays are exact.
class BernoulliOracle final : public AvailabilityOracle {
 public:
  BernoulliOracle(double p, std::uint64_t seed) : p_(p), seed_(seed) {}
  std::set<Thread> available(std::size_t step, const SessionKey& k, const std::set<Thread>& c) const override;
  std::string describe() const override;

 private:
  double p_;
  std::uint64_t seed_;
};

struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// {"mode":"script","steps":[{"available":[...]}]} or {"mode":"bernoulli","p":..,"seed":..}
OraclePtr load_schedule(const std::string& json_text);

// All-available plus, for every thread and every start step below `steps`,
// the oracle withholding that thread from then on.
std::vector<OraclePtr> single_failure_family(const std::set<Thread>& threads, std::size_t steps);

}  // namespace gcq
