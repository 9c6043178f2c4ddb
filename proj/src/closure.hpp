#pragma once

#include <cstddef>
#include <set>
#include <vector>

namespace pcfit::detail {

// Closes `members` under `derive` applied to every pair for which
// `incompatible` holds. Each pair is visited once: a newly added element is
// appended to the worklist and later paired with everything before it.
template <class T, class Incompatible, class Derive>
std::set<T> close_under(std::set<T> members, Incompatible incompatible, Derive derive) {
    std::vector<T> worklist(members.begin(), members.end());
    for (std::size_t k = 0; k < worklist.size(); ++k) {
        for (std::size_t i = 0; i < k; ++i) {
            if (!incompatible(worklist[i], worklist[k])) {
                continue;
            }
            for (auto& d : derive(worklist[i], worklist[k])) {
                if (members.insert(d).second) {
                    worklist.push_back(d);
                }
            }
        }
    }
    return members;
}

}  // namespace pcfit::detail
