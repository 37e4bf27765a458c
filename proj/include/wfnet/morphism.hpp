#pragma once

// Total node maps between two nets.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "wfnet/petri_net.hpp"

namespace wfnet {

/// A total map from the nodes of `source` to the nodes of `target`. Holds
/// both nets by value so a morphism is a self-contained value. Validity as an
/// α- or α̂-morphism is checked separately (see alpha.hpp).
class Morphism {
 public:
  Morphism() = default;

  Morphism(PetriNet source, PetriNet target, std::vector<NodeRef> place_image,
           std::vector<NodeRef> transition_image)
      : source_(std::move(source)),
        target_(std::move(target)),
        place_image_(std::move(place_image)),
        transition_image_(std::move(transition_image)) {
    if (place_image_.size() != source_.place_count() || transition_image_.size() != source_.transition_count())
      throw MapMismatch("image table does not match the source net");
    for (auto* table : {&place_image_, &transition_image_})
      for (auto y : *table)
        if ((y.is_place() && y.index >= target_.place_count()) ||
            (y.is_transition() && y.index >= target_.transition_count()))
          throw MapMismatch("image outside the target net");
  }

  /// Builds a morphism from a name map. Unknown names on either side raise
  /// UnknownNode; unmapped source nodes raise NotTotal.
  static Morphism from_names(PetriNet source, PetriNet target, const std::map<std::string, std::string>& map) {
    for (const auto& [x, y] : map) {
      if (!source.find(x)) throw UnknownNode(x);
      if (!target.find(y)) throw UnknownNode(y);
    }
    std::vector<std::string> missing;
    std::vector<NodeRef> pi(source.place_count()), ti(source.transition_count());
    for (auto x : source.nodes()) {
      auto it = map.find(source.name_of(x));
      if (it == map.end()) {
        missing.push_back(source.name_of(x));
        continue;
      }
      (x.is_place() ? pi : ti)[x.index] = target.node(it->second);
    }
    if (!missing.empty()) throw NotTotal(std::move(missing));
    return Morphism(std::move(source), std::move(target), std::move(pi), std::move(ti));
  }

  static Morphism identity(const PetriNet& net) {
    std::vector<NodeRef> pi, ti;
    for (Index p = 0; p < net.place_count(); ++p) pi.push_back(NodeRef::place(p));
    for (Index t = 0; t < net.transition_count(); ++t) ti.push_back(NodeRef::transition(t));
    return Morphism(net, net, std::move(pi), std::move(ti));
  }

  const PetriNet& source() const { return source_; }
  const PetriNet& target() const { return target_; }

  NodeRef operator()(NodeRef x) const { return x.is_place() ? place_image_[x.index] : transition_image_[x.index]; }
  NodeRef place_image(Index p) const { return place_image_[p]; }
  NodeRef transition_image(Index t) const { return transition_image_[t]; }

  const std::string& image(std::string_view x) const { return target_.name_of((*this)(source_.node(x))); }

  /// Source nodes mapped to y.
  std::vector<NodeRef> inverse(NodeRef y) const {
    std::vector<NodeRef> out;
    for (auto x : source_.nodes())
      if ((*this)(x) == y) out.push_back(x);
    return out;
  }

  /// Image of a node set.
  std::set<NodeRef> image(const std::vector<NodeRef>& xs) const {
    std::set<NodeRef> out;
    for (auto x : xs) out.insert((*this)(x));
    return out;
  }

  /// Image of a marking as a set: each place hit by a marked source place gets one token.
  Marking image(const Marking& m) const {
    Marking out = target_.empty_marking();
    for (Index p : m.support()) {
      auto y = place_image_[p];
      if (y.is_place()) out.set(y.index, 1);
    }
    return out;
  }

  bool surjective() const { return unhit().empty(); }

  /// Target nodes without a preimage.
  std::vector<NodeRef> unhit() const {
    NodeSet hit(target_);
    for (auto x : source_.nodes()) hit.insert((*this)(x));
    std::vector<NodeRef> out;
    for (auto y : target_.nodes())
      if (!hit.contains(y)) out.push_back(y);
    return out;
  }

  std::map<std::string, std::string> to_names() const {
    std::map<std::string, std::string> out;
    for (auto x : source_.nodes()) out.emplace(source_.name_of(x), target_.name_of((*this)(x)));
    return out;
  }

  friend bool operator==(const Morphism&, const Morphism&) = default;

 private:
  PetriNet source_;
  PetriNet target_;
  std::vector<NodeRef> place_image_;
  std::vector<NodeRef> transition_image_;
};

/// Pointwise composition phi ∘ u. The target of u must be structurally the
/// source of phi.
inline Morphism compose_maps(const Morphism& u, const Morphism& phi) {
  if (!u.target().same_structure(phi.source()))
    throw MapMismatch("range of the first map is not the domain of the second");
  std::vector<NodeRef> pi, ti;
  for (Index p = 0; p < u.source().place_count(); ++p) pi.push_back(phi(u.place_image(p)));
  for (Index t = 0; t < u.source().transition_count(); ++t) ti.push_back(phi(u.transition_image(t)));
  return Morphism(u.source(), phi.target(), std::move(pi), std::move(ti));
}

}  // namespace wfnet
