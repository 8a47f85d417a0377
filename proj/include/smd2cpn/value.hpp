#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace smd2cpn {

/// A token colour or an expression result: unit, boolean, integer,
/// enumeration constant or tuple.
class Value {
 public:
  enum class Kind : std::uint8_t { Unit, Bool, Int, Enum, Tuple };

  Value() = default;

  static Value unit() { return Value(); }
  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value symbol(std::string name);
  static Value tuple(std::vector<Value> items);

  Kind kind() const { return kind_; }
  bool as_bool() const;
  std::int64_t as_int() const;
  const std::string& as_symbol() const;
  const std::vector<Value>& items() const;

  friend bool operator==(const Value& a, const Value& b);
  friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  /// Debug rendering, e.g. `()`, `3`, `PAUSED`, `(0,3)`.
  std::string to_string() const;

 private:
  Kind kind_ = Kind::Unit;
  std::int64_t int_ = 0;
  std::string symbol_;
  std::vector<Value> items_;
};

}  // namespace smd2cpn
