#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fairdiv {

using Value = std::int64_t;
using Agent = int;
using Good = int;

/// Valuations: one row per agent, one column per good.
using ValueMatrix = Eigen::Matrix<Value, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ValueVector = Eigen::Matrix<Value, Eigen::Dynamic, 1>;

enum class InstanceErrc {
  dimension_mismatch,
  negative_valuation,
  nonpositive_endowment,
  invalid_parameter,
  malformed_document,
};

class InstanceError : public std::invalid_argument {
 public:
  InstanceError(InstanceErrc code, const std::string& what) : std::invalid_argument(what), code_(code) {}
  InstanceErrc code() const noexcept { return code_; }

 private:
  InstanceErrc code_;
};

/// All stored integers are real quantities multiplied by `scale`.
struct Metadata {
  std::int64_t scale = 1;
  std::string family;
  std::map<std::string, std::string> params;

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

/// A fair division instance: agents, goods, additive integer valuations and
/// strictly positive integer endowments. Immutable once constructed.
class Instance {
 public:
  Instance(ValueMatrix valuations, ValueVector endowments, Metadata meta = {});

  int agents() const { return static_cast<int>(valuations_.rows()); }
  int goods() const { return static_cast<int>(valuations_.cols()); }

  const ValueMatrix& valuations() const { return valuations_; }
  const ValueVector& endowments() const { return endowments_; }
  Value value(Agent i, Good g) const { return valuations_(i, g); }
  Value endowment(Agent i) const { return endowments_(i); }

  std::int64_t scale() const { return meta_.scale; }
  const Metadata& metadata() const { return meta_; }

  /// v_i(G) for every agent.
  ValueVector totals() const { return valuations_.rowwise().sum(); }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.valuations_ == b.valuations_ && a.endowments_ == b.endowments_ && a.meta_ == b.meta_;
  }

 private:
  ValueMatrix valuations_;
  ValueVector endowments_;
  Metadata meta_;
};

Instance new_instance(ValueMatrix valuations, ValueVector endowments, Metadata meta = {});

/// Total assignment of goods to agents.
class Allocation {
 public:
  Allocation(std::vector<Agent> owner, int agents);

  static Allocation all_to(Agent agent, int agents, int goods);

  int agents() const { return agents_; }
  int goods() const { return static_cast<int>(owner_.size()); }
  Agent owner(Good g) const { return owner_[static_cast<std::size_t>(g)]; }
  std::span<const Agent> owners() const { return owner_; }

  std::vector<std::vector<Good>> bundles() const;
  std::vector<int> bundle_sizes() const;

  /// m x n one-hot matrix X with X(g, i) = 1 iff good g belongs to agent i.
  ValueMatrix assignment() const;

  friend bool operator==(const Allocation&, const Allocation&) = default;

 private:
  std::vector<Agent> owner_;
  int agents_;
};

void require_compatible(const Instance& inst, const Allocation& alloc);

/// W(i, j) = v_i(A_j).
ValueMatrix cross_values(const Instance& inst, const Allocation& alloc);

/// v_i(A_i) for every agent.
ValueVector own_values(const Instance& inst, const Allocation& alloc);

}  // namespace fairdiv
