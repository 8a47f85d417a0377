#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "smd2cpn/cpn_model.hpp"
#include "smd2cpn/smd_model.hpp"

namespace smd2cpn {

struct TranslationConfig {
  /// Event tokens of each kind the environment may have pending at once.
  std::uint32_t event_pool_capacity = 1;
  /// Generate one event-producing transition per event.
  bool include_environment = true;
};

enum class BehaviourRole : std::uint8_t { Exit, Effect, Entry, Do };

/// One place in the generated net where a behaviour executes.
struct BehaviourOccurrence {
  std::string transition;  // SMD transition id; empty for do behaviours
  std::string location;    // dispatch location of an exit chain, else empty
  std::string branch;      // history restore branch (child or NONE), else empty
  BehaviourRole role = BehaviourRole::Effect;
  std::string owner;  // state owning the behaviour; the transition for effects
  std::size_t index = 0;

  friend auto operator<=>(const BehaviourOccurrence&, const BehaviourOccurrence&) = default;
};

/// Records which net nodes each source element became.
struct TranslationMap {
  std::map<std::string, std::string> state_place;    // simple state -> activity place
  std::map<std::string, std::string> final_place;    // composite or machine -> ^F place
  std::map<std::string, std::string> history_place;  // composite -> ^H place
  std::map<BehaviourOccurrence, std::string> behaviour_trans;
  std::map<std::string, std::vector<std::string>> transition_subnet;  // SMD transition -> nodes

  std::map<std::string, std::string> dispatch_location;  // dispatch transition -> location state
  std::map<std::string, std::string> history_entry;      // SMD transition -> restore place
  std::set<std::string> in_flight_places;
  std::map<std::string, std::string> do_transition;  // state -> self-loop transition
  std::optional<std::string> vars_place;
  std::optional<std::string> events_place;
  std::map<std::string, std::string> event_producer;        // event -> transition
  std::map<std::string, std::string> event_capacity_place;  // event -> place
  std::uint32_t event_capacity = 0;                         // 0 without environment

  /// Activity, ^F and in-flight places: the single locus of control.
  std::set<std::string> control_places() const;
  /// Source location (simple state or `X.F`) held by a stable control place.
  std::optional<std::string> location_of(const std::string& place) const;
};

inline constexpr const char* kNoHistory = "NONE";

/// Pass 1: places for simple states, ^F and ^H places, VARS, EVENTS and the
/// environment, plus do self-loops.
ColouredNet translate_states(const Hierarchy& h, const TranslationConfig& config, TranslationMap& map);

/// Pass 2: dispatch transitions and in-flight chains for every SMD
/// transition. History targets stop at their restore place.
void translate_transitions(const Hierarchy& h, TranslationMap& map, ColouredNet& net);

/// Pass 3: restore transitions leaving the restore place of every transition
/// that targets a history pseudostate.
void translate_history(const Hierarchy& h, TranslationMap& map, ColouredNet& net);

/// Validates, then runs the three passes on the model with states sorted by
/// name and transitions by id. Throws ValidationError.
std::pair<ColouredNet, TranslationMap> translate(const StateMachineModel& model,
                                                 const TranslationConfig& config = {});

/// Broken invariants of a marking of a generated net: one control token,
/// one VARS token, one token on every ^H place. Empty when safe.
std::vector<std::string> safety_violations(const ColouredNet& net, const TranslationMap& map, const Marking& m);

}  // namespace smd2cpn
