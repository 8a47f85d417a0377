#include "smd2cpn/value.hpp"

#include "smd2cpn/error.hpp"

namespace smd2cpn {

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.int_ = b ? 1 : 0;
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v;
  v.kind_ = Kind::Int;
  v.int_ = i;
  return v;
}

Value Value::symbol(std::string name) {
  Value v;
  v.kind_ = Kind::Enum;
  v.symbol_ = std::move(name);
  return v;
}

Value Value::tuple(std::vector<Value> items) {
  Value v;
  v.kind_ = Kind::Tuple;
  v.items_ = std::move(items);
  return v;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw Error("value " + to_string() + " is not a boolean");
  return int_ != 0;
}

std::int64_t Value::as_int() const {
  if (kind_ != Kind::Int) throw Error("value " + to_string() + " is not an integer");
  return int_;
}

const std::string& Value::as_symbol() const {
  if (kind_ != Kind::Enum) throw Error("value " + to_string() + " is not an enumeration constant");
  return symbol_;
}

const std::vector<Value>& Value::items() const {
  if (kind_ != Kind::Tuple) throw Error("value " + to_string() + " is not a tuple");
  return items_;
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  switch (a.kind_) {
    case Value::Kind::Unit:
      return std::strong_ordering::equal;
    case Value::Kind::Bool:
    case Value::Kind::Int:
      return a.int_ <=> b.int_;
    case Value::Kind::Enum:
      return a.symbol_.compare(b.symbol_) <=> 0;
    case Value::Kind::Tuple:
      break;
  }
  const std::size_t n = std::min(a.items_.size(), b.items_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.items_[i] <=> b.items_[i]; c != 0) return c;
  }
  return a.items_.size() <=> b.items_.size();
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Unit:
      return "()";
    case Kind::Bool:
      return int_ ? "true" : "false";
    case Kind::Int:
      return std::to_string(int_);
    case Kind::Enum:
      return symbol_;
    case Kind::Tuple:
      break;
  }
  std::string out = "(";
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) out += ",";
    out += items_[i].to_string();
  }
  return out + ")";
}

}  // namespace smd2cpn
