#pragma once

#include <algorithm>

namespace vecsim {

// Edge-server deadline of a request issued in slot t of DoI n: the tighter of
// the requester's hard deadline and the slots left before the next cache
// replacement.
inline int server_deadline(int t, int n, int doi_slots, int max_delay_slots) {
  return std::min(max_delay_slots, (n + 1) * doi_slots - t);
}

inline int server_deadline(int t, int doi_slots, int max_delay_slots) {
  return server_deadline(t, t / doi_slots, doi_slots, max_delay_slots);
}

} // namespace vecsim
