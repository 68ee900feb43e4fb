#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace quotecross {

// Byte-level multi-pattern automaton. Patterns are added with an opaque
// id, build() wires the failure and dictionary links, and scan() walks a
// text once, reporting every pattern id at every position it occurs.
//
// Scanning is const and safe to share across threads.
class AhoCorasick {
  public:
    void add(std::string_view pattern, std::int32_t id) {
        std::int32_t state = 0;
        for (unsigned char c : pattern) {
            std::int32_t next = find_next(state, c);
            if (next < 0) {
                next = static_cast<std::int32_t>(nodes_.size());
                nodes_.emplace_back();
                insert_next(state, c, next);
            }
            state = next;
        }
        nodes_[static_cast<std::size_t>(state)].out.push_back(id);
        ++patterns_;
        built_ = false;
    }

    std::size_t pattern_count() const { return patterns_; }

    // Breadth-first failure-link construction; dictionary links let scan
    // enumerate matches without copying output lists down the trie.
    void build() {
        root_next_.fill(0);
        for (const auto& [c, next] : nodes_[0].next) {
            root_next_[c] = next;
        }
        std::vector<std::int32_t> queue;
        queue.reserve(nodes_.size());
        for (const auto& [c, next] : nodes_[0].next) {
            nodes_[static_cast<std::size_t>(next)].fail = 0;
            queue.push_back(next);
        }
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::int32_t state = queue[head];
            Node& node = nodes_[static_cast<std::size_t>(state)];
            node.dict = !nodes_[static_cast<std::size_t>(node.fail)].out.empty()
                            ? node.fail
                            : nodes_[static_cast<std::size_t>(node.fail)].dict;
            for (const auto& [c, next] : node.next) {
                nodes_[static_cast<std::size_t>(next)].fail = step(node.fail, c);
                queue.push_back(next);
            }
        }
        built_ = true;
    }

    // Calls fn(id) for every occurrence of every pattern in `text`.
    template <typename Fn>
    void scan(std::string_view text, Fn&& fn) const {
        std::int32_t state = 0;
        for (unsigned char c : text) {
            state = step(state, c);
            const Node* node = &nodes_[static_cast<std::size_t>(state)];
            if (node->out.empty() && node->dict < 0) continue;
            for (std::int32_t s = state; s >= 0;
                 s = nodes_[static_cast<std::size_t>(s)].dict) {
                for (std::int32_t id : nodes_[static_cast<std::size_t>(s)].out) {
                    fn(id);
                }
            }
        }
    }

    bool built() const { return built_; }

  private:
    struct Node {
        std::vector<std::pair<unsigned char, std::int32_t>> next;  // sorted by byte
        std::int32_t fail = 0;
        std::int32_t dict = -1;
        std::vector<std::int32_t> out;
    };

    std::int32_t find_next(std::int32_t state, unsigned char c) const {
        const auto& next = nodes_[static_cast<std::size_t>(state)].next;
        auto it = std::lower_bound(next.begin(), next.end(), c,
                                   [](const auto& p, unsigned char v) { return p.first < v; });
        return (it != next.end() && it->first == c) ? it->second : -1;
    }

    void insert_next(std::int32_t state, unsigned char c, std::int32_t target) {
        auto& next = nodes_[static_cast<std::size_t>(state)].next;
        auto it = std::lower_bound(next.begin(), next.end(), c,
                                   [](const auto& p, unsigned char v) { return p.first < v; });
        next.insert(it, {c, target});
    }

    std::int32_t step(std::int32_t state, unsigned char c) const {
        while (true) {
            if (state == 0) return root_next_[c];
            std::int32_t next = find_next(state, c);
            if (next >= 0) return next;
            state = nodes_[static_cast<std::size_t>(state)].fail;
        }
    }

    std::vector<Node> nodes_{1};
    std::array<std::int32_t, 256> root_next_{};
    std::size_t patterns_ = 0;
    bool built_ = false;
};

}  // namespace quotecross
