/* Copyright 2026 The hashner Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef HASHNER_TRANSITION_H_
#define HASHNER_TRANSITION_H_

// BILUO transition system for entity recognition.
//
// A state walks the tokens left to right. It holds at most one open entity
// and the list of completed ones. Actions (each advances by one token):
//  - Begin-x: open an entity labelled x at the current token.
//  - In-x:    extend the open entity (label must be x).
//  - Last-x:  extend and close the open entity (label must be x).
//  - Unit-x:  add a single-token entity labelled x.
//  - Out:     skip the token.
// Begin/Unit/Out need no open entity; In/Last need one with label x. An entity
// must be closed by the final token, so Begin and In are invalid there.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hashner {

struct EntitySpan {
  int start = 0;  // inclusive
  int end = 0;    // exclusive
  std::string label;

  auto operator<=>(const EntitySpan&) const = default;
};

enum class ActionKind : uint8_t { kBegin = 0, kIn, kLast, kUnit, kOut };

struct Action {
  ActionKind kind = ActionKind::kOut;
  int label = -1;  // index into the label set; -1 for Out

  bool operator==(const Action&) const = default;
};

// Integer-labelled span used inside the transition system.
struct Span {
  int start = 0;
  int end = 0;
  int label = 0;

  auto operator<=>(const Span&) const = default;
};

// Maps labels and actions to dense ids: Begin-l = l, In-l = L + l,
// Last-l = 2L + l, Unit-l = 3L + l, Out = 4L.
class ActionSpace {
 public:
  explicit ActionSpace(std::vector<std::string> labels);

  int num_labels() const { return static_cast<int>(labels_.size()); }
  int size() const { return 4 * num_labels() + 1; }
  const std::vector<std::string>& labels() const { return labels_; }

  int label_id(const std::string& label) const;  // -1 if unknown
  const std::string& label_name(int id) const { return labels_.at(id); }

  int encode(Action a) const;
  Action decode(int id) const;
  std::string name(int id) const;  // e.g. "B-PER", "O"

  std::vector<Span> to_ids(std::span<const EntitySpan> spans) const;
  std::vector<EntitySpan> to_names(std::span<const Span> spans) const;

 private:
  std::vector<std::string> labels_;
};

class TransitionState {
 public:
  explicit TransitionState(int length) : length_(length) {}

  int position() const { return position_; }
  int length() const { return length_; }
  bool has_open() const { return open_label_ >= 0; }
  int open_label() const { return open_label_; }
  int open_start() const { return open_start_; }
  const std::vector<Span>& completed() const { return completed_; }
  bool is_terminal() const { return position_ == length_ && !has_open(); }

  bool is_valid(Action a) const;
  // Throws StateError when the action is invalid here.
  void apply(Action a);

  bool operator==(const TransitionState&) const = default;

 private:
  int length_;
  int position_ = 0;
  int open_label_ = -1;
  int open_start_ = -1;
  std::vector<Span> completed_;
};

// Validity mask over the action space. Throws StateError on terminal states.
std::vector<uint8_t> valid_actions(const TransitionState& state,
                                   const ActionSpace& actions);

TransitionState apply_action(const TransitionState& state, Action action);

// Gold entities indexed for the dynamic oracle.
class GoldIndex {
 public:
  GoldIndex(int length, std::span<const Span> gold);

  int length() const { return static_cast<int>(gold_from_.size()) - 1; }
  int size() const { return size_; }
  // Gold entities with start >= position.
  int gold_from(int position) const { return gold_from_[position]; }
  // Gold entity starting at `start`, if any.
  const Span* starting_at(int start) const;
  bool contains(const Span& span) const;

 private:
  std::vector<std::optional<Span>> by_start_;
  std::vector<int> gold_from_;
  int size_ = 0;
};

// Best final -FP-FN reachable from `state`.
int optimal_value(const TransitionState& state, const GoldIndex& gold);

inline constexpr int kInvalidCost = -1;

// cost(a) = V*(state) - V*(apply(a, state)) for valid actions; kInvalidCost
// for invalid ones. Costs are computed incrementally without copying state.
std::vector<int> oracle_costs(const TransitionState& state,
                              const GoldIndex& gold,
                              const ActionSpace& actions);

// Exhaustive search over every valid action sequence to a terminal state.
// Refuses (SizeError) when more than 8 tokens remain or more than 2 labels.
int brute_force_value(const TransitionState& state, std::span<const Span> gold,
                      const ActionSpace& actions);

// Slot layout: current token, entity first, entity last so far, entity
// second, entity third, entity second-to-last. -1 marks an empty slot.
std::vector<int> state_feature_tokens(const TransitionState& state,
                                      int num_slots = 6);
void state_feature_tokens(const TransitionState& state, std::span<int> out);

// BILUO tags, e.g. "U-PER", "B-LOC", "I-LOC", "L-LOC", "O".
std::vector<std::string> biluo_encode(int length,
                                      std::span<const EntitySpan> spans);
std::vector<EntitySpan> biluo_decode(std::span<const std::string> tags);

}  // namespace hashner

#endif  // HASHNER_TRANSITION_H_
