#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smd2cpn/cpn_model.hpp"
#include "smd2cpn/smd_model.hpp"
#include "smd2cpn/translator.hpp"

namespace smd2cpn {

/// Dynamic state of the interpreter. `active` is a simple state, or a final
/// state `X.F` once a region has completed.
struct Configuration {
  std::string active;
  std::map<std::string, std::int64_t> valuation;
  std::map<std::string, std::string> history;  // history composite -> child or NONE
  std::map<std::string, std::uint32_t> pending;  // event -> count, no zero entries

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

struct TraceStep {
  std::optional<std::string> event;  // consumed event
  std::vector<std::string> behaviours;
  std::string state;  // active state afterwards

  friend auto operator<=>(const TraceStep&, const TraceStep&) = default;
  std::string to_string() const;
};

using Trace = std::vector<TraceStep>;

/// A transition to take, with the event it consumes.
struct Choice {
  std::string transition;
  std::optional<std::string> event;

  friend auto operator<=>(const Choice&, const Choice&) = default;
};

/// Run-to-completion interpreter over a validated model.
class Interpreter {
 public:
  /// Throws ValidationError.
  explicit Interpreter(StateMachineModel model);

  const Hierarchy& hierarchy() const { return h_; }

  Configuration initial_configuration() const;

  /// Enabled transitions, sorted by transition id.
  std::vector<Choice> enabled_transitions(const Configuration& c) const;

  /// Throws Error when the choice is not enabled in `c`.
  std::pair<Configuration, TraceStep> step(const Configuration& c, const Choice& choice) const;

  /// One execution of the active state's do behaviour, when it has one.
  std::optional<std::pair<Configuration, TraceStep>> do_step(const Configuration& c) const;

  /// Adds a pending event. Throws LookupError for unknown events.
  Configuration inject(const Configuration& c, const std::string& event) const;

 private:
  bool is_enabled(const Configuration& c, const TransitionDef& t) const;
  void run(Configuration& c, const BehaviourDef& b, TraceStep& out) const;

  Hierarchy h_;
  std::map<std::string, const TransitionDef*> by_id_;
};

Configuration initial_configuration(const StateMachineModel& model);
std::vector<Choice> enabled_transitions(const StateMachineModel& model, const Configuration& c);
std::pair<Configuration, TraceStep> step(const StateMachineModel& model, const Configuration& c, const Choice& choice);

/// Observable move of either system at a stable point: the environment adds
/// an event, or the machine takes one run-to-completion step.
struct ObservableStep {
  enum class Kind : std::uint8_t { Inject, Step };
  Kind kind = Kind::Step;
  std::string event;  // injected or consumed; empty for none
  std::vector<std::string> behaviours;  // without do behaviours
  std::string state;  // resulting active states, `+`-joined

  friend auto operator<=>(const ObservableStep&, const ObservableStep&) = default;
  std::string to_string() const;
};

struct EquivalenceOptions {
  std::size_t depth = 8;
  /// Longest in-flight run accepted before the net is declared broken.
  std::size_t chain_bound = 10000;
  /// Shuffles successor order; the verdict must not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

struct EquivalenceVerdict {
  bool equivalent = true;
  /// Shared prefix leading to the divergence.
  std::vector<ObservableStep> trace;
  /// Move one side can make and the other cannot match; empty when equivalent.
  std::optional<ObservableStep> unmatched;
  bool unmatched_by_net = true;  // false: the net has the extra move
  std::size_t pairs_explored = 0;

  std::string to_string() const;
};

/// Bounded bisimulation between the interpreter and the net projected onto
/// stable markings. Throws Error when an in-flight run exceeds the chain
/// bound.
EquivalenceVerdict check_trace_equivalence(const StateMachineModel& model, const ColouredNet& net,
                                           const TranslationMap& map, const EquivalenceOptions& options = {});

}  // namespace smd2cpn
