#include "aoci/agent/baselines.hpp"

namespace aoci::agent {

ValidAction random_act(const ActionSpaces& spaces, Rng& rng) {
  ProtoAction proto;
  for (const auto& sub : spaces.subspaces) proto.indices.push_back(1 + uniform_index(rng, sub.size() - 1));
  return map_to_valid(proto, spaces);
}

Decision RandomAgent::act(const Eigen::VectorXd&, ActMode, Rng& rng) {
  ProtoAction proto;
  for (const auto& sub : spaces_.subspaces) proto.indices.push_back(1 + uniform_index(rng, sub.size() - 1));
  Decision d;
  d.action = map_to_valid(proto, spaces_);
  d.record = Eigen::VectorXd::Constant(1, static_cast<double>(canonical_index(proto, spaces_)));
  return d;
}

}  // namespace aoci::agent
