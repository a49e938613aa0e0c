#include "fairdiv/instance.hpp"

#include <utility>

namespace fairdiv {

Instance::Instance(ValueMatrix valuations, ValueVector endowments, Metadata meta)
    : valuations_(std::move(valuations)), endowments_(std::move(endowments)), meta_(std::move(meta)) {
  if (valuations_.rows() < 1 || valuations_.cols() < 1)
    throw InstanceError(InstanceErrc::dimension_mismatch, "instance needs at least one agent and one good");
  if (endowments_.size() != valuations_.rows())
    throw InstanceError(InstanceErrc::dimension_mismatch,
                        "endowment vector has " + std::to_string(endowments_.size()) + " entries for " +
                            std::to_string(valuations_.rows()) + " agents");
  if ((valuations_.array() < 0).any())
    throw InstanceError(InstanceErrc::negative_valuation, "valuations must be non-negative");
  if ((endowments_.array() <= 0).any())
    throw InstanceError(InstanceErrc::nonpositive_endowment, "endowments must be strictly positive");
  if (meta_.scale < 1) throw InstanceError(InstanceErrc::invalid_parameter, "scale factor must be positive");
}

Instance new_instance(ValueMatrix valuations, ValueVector endowments, Metadata meta) {
  return Instance(std::move(valuations), std::move(endowments), std::move(meta));
}

Allocation::Allocation(std::vector<Agent> owner, int agents) : owner_(std::move(owner)), agents_(agents) {
  if (agents_ < 1) throw std::invalid_argument("allocation needs at least one agent");
  for (Agent a : owner_)
    if (a < 0 || a >= agents_)
      throw std::invalid_argument("owner " + std::to_string(a) + " outside [0, " + std::to_string(agents_) + ")");
}

Allocation Allocation::all_to(Agent agent, int agents, int goods) {
  return Allocation(std::vector<Agent>(static_cast<std::size_t>(goods), agent), agents);
}

std::vector<std::vector<Good>> Allocation::bundles() const {
  std::vector<std::vector<Good>> out(static_cast<std::size_t>(agents_));
  for (Good g = 0; g < goods(); ++g) out[static_cast<std::size_t>(owner(g))].push_back(g);
  return out;
}

std::vector<int> Allocation::bundle_sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(agents_), 0);
  for (Agent a : owner_) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

ValueMatrix Allocation::assignment() const {
  ValueMatrix x = ValueMatrix::Zero(goods(), agents_);
  for (Good g = 0; g < goods(); ++g) x(g, owner(g)) = 1;
  return x;
}

void require_compatible(const Instance& inst, const Allocation& alloc) {
  if (alloc.agents() != inst.agents() || alloc.goods() != inst.goods())
    throw std::invalid_argument("allocation shape " + std::to_string(alloc.agents()) + "x" +
                                std::to_string(alloc.goods()) + " does not match instance " +
                                std::to_string(inst.agents()) + "x" + std::to_string(inst.goods()));
}

ValueMatrix cross_values(const Instance& inst, const Allocation& alloc) {
  require_compatible(inst, alloc);
  return inst.valuations() * alloc.assignment();
}

ValueVector own_values(const Instance& inst, const Allocation& alloc) {
  require_compatible(inst, alloc);
  ValueVector out = ValueVector::Zero(inst.agents());
  for (Good g = 0; g < inst.goods(); ++g) out(alloc.owner(g)) += inst.value(alloc.owner(g), g);
  return out;
}

}  // namespace fairdiv
