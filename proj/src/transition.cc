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

#include "hashner/transition.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "hashner/errors.h"

namespace hashner {

// ---------------------------------------------------------------------------
// ActionSpace

ActionSpace::ActionSpace(std::vector<std::string> labels)
    : labels_(std::move(labels)) {
  auto sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("duplicate entity label");
  }
  for (const auto& l : labels_) {
    if (l.empty()) throw ValidationError("empty entity label");
  }
}

int ActionSpace::label_id(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

int ActionSpace::encode(Action a) const {
  if (a.kind == ActionKind::kOut) return 4 * num_labels();
  if (a.label < 0 || a.label >= num_labels()) {
    throw std::out_of_range("action label out of range");
  }
  return static_cast<int>(a.kind) * num_labels() + a.label;
}

Action ActionSpace::decode(int id) const {
  const int n = num_labels();
  if (id < 0 || id > 4 * n) throw std::out_of_range("action id out of range");
  if (id == 4 * n) return Action{ActionKind::kOut, -1};
  return Action{static_cast<ActionKind>(id / n), id % n};
}

std::string ActionSpace::name(int id) const {
  const Action a = decode(id);
  static constexpr const char* kPrefix[] = {"B-", "I-", "L-", "U-"};
  if (a.kind == ActionKind::kOut) return "O";
  return kPrefix[static_cast<int>(a.kind)] + labels_[a.label];
}

std::vector<Span> ActionSpace::to_ids(std::span<const EntitySpan> spans) const {
  std::vector<Span> out;
  out.reserve(spans.size());
  for (const auto& s : spans) {
    const int id = label_id(s.label);
    if (id < 0) throw ValidationError("unknown entity label: " + s.label);
    out.push_back(Span{s.start, s.end, id});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EntitySpan> ActionSpace::to_names(std::span<const Span> spans) const {
  std::vector<EntitySpan> out;
  out.reserve(spans.size());
  for (const auto& s : spans) {
    out.push_back(EntitySpan{s.start, s.end, labels_.at(s.label)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// TransitionState

bool TransitionState::is_valid(Action a) const {
  if (is_terminal() || position_ >= length_) return false;
  const bool last_token = position_ == length_ - 1;
  switch (a.kind) {
    case ActionKind::kBegin:
      return !has_open() && !last_token;
    case ActionKind::kUnit:
    case ActionKind::kOut:
      return !has_open();
    case ActionKind::kIn:
      return has_open() && open_label_ == a.label && !last_token;
    case ActionKind::kLast:
      return has_open() && open_label_ == a.label;
  }
  return false;
}

void TransitionState::apply(Action a) {
  if (!is_valid(a)) {
    throw StateError("invalid action at position " + std::to_string(position_));
  }
  switch (a.kind) {
    case ActionKind::kBegin:
      open_label_ = a.label;
      open_start_ = position_;
      break;
    case ActionKind::kIn:
    case ActionKind::kOut:
      break;
    case ActionKind::kLast:
      completed_.push_back(Span{open_start_, position_ + 1, open_label_});
      open_label_ = -1;
      open_start_ = -1;
      break;
    case ActionKind::kUnit:
      completed_.push_back(Span{position_, position_ + 1, a.label});
      break;
  }
  ++position_;
}

std::vector<uint8_t> valid_actions(const TransitionState& state,
                                   const ActionSpace& actions) {
  if (state.is_terminal()) throw StateError("valid_actions on terminal state");
  std::vector<uint8_t> mask(actions.size());
  for (int id = 0; id < actions.size(); ++id) {
    mask[id] = state.is_valid(actions.decode(id)) ? 1 : 0;
  }
  return mask;
}

TransitionState apply_action(const TransitionState& state, Action action) {
  TransitionState next = state;
  next.apply(action);
  return next;
}

// ---------------------------------------------------------------------------
// Dynamic oracle

GoldIndex::GoldIndex(int length, std::span<const Span> gold)
    : by_start_(std::max(length, 0) + 1), gold_from_(std::max(length, 0) + 2, 0) {
  std::vector<Span> sorted(gold.begin(), gold.end());
  std::sort(sorted.begin(), sorted.end());
  int prev_end = 0;
  for (const auto& s : sorted) {
    if (s.start < 0 || s.end > length || s.start >= s.end) {
      throw ValidationError("gold span [" + std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ") out of range");
    }
    if (s.start < prev_end) {
      throw ValidationError("overlapping gold spans at token " +
                            std::to_string(s.start));
    }
    prev_end = s.end;
    by_start_[s.start] = s;
  }
  size_ = static_cast<int>(sorted.size());
  gold_from_.resize(length + 1);
  for (int p = length; p >= 0; --p) {
    gold_from_[p] = (p + 1 <= length ? gold_from_[p + 1] : 0) +
                    (p < length && by_start_[p] ? 1 : 0);
  }
}

const Span* GoldIndex::starting_at(int start) const {
  if (start < 0 || start >= static_cast<int>(by_start_.size())) return nullptr;
  return by_start_[start] ? &*by_start_[start] : nullptr;
}

bool GoldIndex::contains(const Span& span) const {
  const Span* g = starting_at(span.start);
  return g && *g == span;
}

namespace {

constexpr int kNegInf = std::numeric_limits<int>::min() / 4;

// Best future contribution of an open entity (label, start) that must still
// absorb the token at `position`. Each future entity counts +1 when gold and
// -1 otherwise; gold entities after the close are all recoverable.
int open_future(const GoldIndex& gold, int label, int start, int position) {
  int best = -1 + gold.gold_from(position + 1);
  const Span* g = gold.starting_at(start);
  if (g && g->label == label && g->end >= position + 1) {
    best = std::max(best, 1 + gold.gold_from(g->end));
  }
  return best;
}

int completed_term(const TransitionState& state, const GoldIndex& gold) {
  int term = 0;
  for (const auto& c : state.completed()) term += gold.contains(c) ? 1 : -1;
  return term;
}

}  // namespace

int optimal_value(const TransitionState& state, const GoldIndex& gold) {
  const int base = -gold.size() + completed_term(state, gold);
  if (!state.has_open()) return base + gold.gold_from(state.position());
  if (state.position() >= state.length()) {
    throw StateError("open entity at end of document");
  }
  return base + open_future(gold, state.open_label(), state.open_start(),
                            state.position());
}

std::vector<int> oracle_costs(const TransitionState& state,
                              const GoldIndex& gold,
                              const ActionSpace& actions) {
  if (state.is_terminal()) throw StateError("oracle_costs on terminal state");
  const int base = -gold.size() + completed_term(state, gold);
  const int current = optimal_value(state, gold);
  const int i = state.position();
  std::vector<int> costs(actions.size(), kInvalidCost);
  for (int id = 0; id < actions.size(); ++id) {
    const Action a = actions.decode(id);
    if (!state.is_valid(a)) continue;
    int child = kNegInf;
    switch (a.kind) {
      case ActionKind::kOut:
        child = base + gold.gold_from(i + 1);
        break;
      case ActionKind::kUnit: {
        const Span s{i, i + 1, a.label};
        child = base + (gold.contains(s) ? 1 : -1) + gold.gold_from(i + 1);
        break;
      }
      case ActionKind::kBegin:
        child = base + open_future(gold, a.label, i, i + 1);
        break;
      case ActionKind::kIn:
        child = base + open_future(gold, a.label, state.open_start(), i + 1);
        break;
      case ActionKind::kLast: {
        const Span s{state.open_start(), i + 1, a.label};
        child = base + (gold.contains(s) ? 1 : -1) + gold.gold_from(i + 1);
        break;
      }
    }
    costs[id] = current - child;
  }
  return costs;
}

int brute_force_value(const TransitionState& state, std::span<const Span> gold,
                      const ActionSpace& actions) {
  if (state.length() - state.position() > 8 || actions.num_labels() > 2) {
    throw SizeError("brute force limited to 8 remaining tokens and 2 labels");
  }
  const std::set<Span> gold_set(gold.begin(), gold.end());
  std::function<int(const TransitionState&)> search =
      [&](const TransitionState& s) -> int {
    if (s.is_terminal()) {
      int fp = 0;
      int tp = 0;
      for (const auto& c : s.completed()) {
        if (gold_set.count(c)) {
          ++tp;
        } else {
          ++fp;
        }
      }
      const int fn = static_cast<int>(gold_set.size()) - tp;
      return -fp - fn;
    }
    int best = kNegInf;
    for (int id = 0; id < actions.size(); ++id) {
      const Action a = actions.decode(id);
      if (!s.is_valid(a)) continue;
      best = std::max(best, search(apply_action(s, a)));
    }
    return best;
  };
  return search(state);
}

// ---------------------------------------------------------------------------
// State features

void state_feature_tokens(const TransitionState& state, std::span<int> out) {
  std::fill(out.begin(), out.end(), -1);
  if (out.empty()) return;
  const int i = state.position();
  if (i < state.length()) out[0] = i;
  if (!state.has_open()) return;
  const int first = state.open_start();
  const int last = i - 1;  // open entity covers [first, i)
  // Slots after the current token alternate: first, last, then walk inward
  // from the front (second, third, ...) interleaved with the back.
  std::vector<int> entity = {first, last, first + 1, first + 2, last - 1};
  for (int k = 3; static_cast<int>(entity.size()) < static_cast<int>(out.size()) - 1; ++k) {
    entity.push_back(first + k);
    entity.push_back(last - k + 1);
  }
  for (size_t s = 1; s < out.size(); ++s) {
    const int t = entity[s - 1];
    out[s] = (t >= first && t <= last) ? t : -1;
  }
}

std::vector<int> state_feature_tokens(const TransitionState& state,
                                      int num_slots) {
  std::vector<int> out(std::max(num_slots, 0));
  state_feature_tokens(state, out);
  return out;
}

// ---------------------------------------------------------------------------
// BILUO

std::vector<std::string> biluo_encode(int length,
                                      std::span<const EntitySpan> spans) {
  std::vector<std::string> tags(std::max(length, 0), "O");
  std::vector<int> owner(tags.size(), -1);
  std::vector<int> bad;
  for (size_t k = 0; k < spans.size(); ++k) {
    const auto& s = spans[k];
    if (s.start < 0 || s.end > length || s.start >= s.end || s.label.empty()) {
      bad.push_back(s.start);
      continue;
    }
    for (int t = s.start; t < s.end; ++t) {
      if (owner[t] >= 0) {
        bad.push_back(t);
        continue;
      }
      owner[t] = static_cast<int>(k);
    }
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "invalid or overlapping spans at token(s)";
    for (int b : bad) msg << ' ' << b;
    throw ValidationError(msg.str());
  }
  for (const auto& s : spans) {
    if (s.end - s.start == 1) {
      tags[s.start] = "U-" + s.label;
      continue;
    }
    tags[s.start] = "B-" + s.label;
    for (int t = s.start + 1; t < s.end - 1; ++t) tags[t] = "I-" + s.label;
    tags[s.end - 1] = "L-" + s.label;
  }
  return tags;
}

std::vector<EntitySpan> biluo_decode(std::span<const std::string> tags) {
  std::vector<EntitySpan> spans;
  std::vector<int> bad;
  int open_start = -1;
  std::string open_label;
  for (int t = 0; t < static_cast<int>(tags.size()); ++t) {
    const std::string& tag = tags[t];
    char kind = 0;
    std::string label;
    if (tag == "O") {
      kind = 'O';
    } else if (tag.size() > 2 && tag[1] == '-' &&
               std::string_view("BILU").find(tag[0]) != std::string_view::npos) {
      kind = tag[0];
      label = tag.substr(2);
    } else {
      bad.push_back(t);
      continue;
    }
    const bool open = open_start >= 0;
    switch (kind) {
      case 'O':
      case 'U':
      case 'B':
        if (open) {
          bad.push_back(t);
          open_start = -1;
        }
        if (kind == 'U') spans.push_back(EntitySpan{t, t + 1, label});
        if (kind == 'B') {
          open_start = t;
          open_label = label;
        }
        break;
      case 'I':
      case 'L':
        if (!open || open_label != label) {
          bad.push_back(t);
          open_start = -1;
          break;
        }
        if (kind == 'L') {
          spans.push_back(EntitySpan{open_start, t + 1, label});
          open_start = -1;
        }
        break;
    }
  }
  if (open_start >= 0) bad.push_back(static_cast<int>(tags.size()));
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "malformed BILUO sequence at position(s)";
    for (int b : bad) msg << ' ' << b;
    throw ValidationError(msg.str());
  }
  return spans;
}

}  // namespace hashner
