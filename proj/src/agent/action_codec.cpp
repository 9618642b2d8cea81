#include "aoci/agent/action_codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoci::agent {

DecomposedCodec::DecomposedCodec(ActionSpaces spaces) : spaces_(std::move(spaces)) {
  for (auto s : spaces_.sizes()) sizes_.push_back(static_cast<double>(s));
}

ValidAction DecomposedCodec::decode(const PrimitiveAction& primitive) const {
  return map_to_valid(discretize(primitive, spaces_), spaces_);
}

FlatCodec::FlatCodec(ActionSpaces spaces) : spaces_(std::move(spaces)) {
  sizes_.push_back(static_cast<double>(spaces_.total_valid));
}

ValidAction FlatCodec::decode(const PrimitiveAction& primitive) const {
  if (primitive.values.size() != 1) throw std::invalid_argument("FlatCodec: expected a scalar primitive action");
  const double v = std::max(0.0, std::floor(primitive.values[0]));
  const auto index = std::min(static_cast<std::uint64_t>(v), spaces_.total_valid - 1);
  return map_to_valid(proto_from_canonical(index, spaces_), spaces_);
}

}  // namespace aoci::agent
