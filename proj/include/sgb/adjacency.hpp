#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sgb {

// Dense symmetric boolean adjacency with self-loops on the diagonal.
struct Adjacency {
    std::size_t n = 0;
    std::vector<std::uint8_t> cells;  // row-major n*n

    Adjacency() = default;
    explicit Adjacency(std::size_t size) : n(size), cells(size * size, 0) {
        for (std::size_t i = 0; i < size; ++i) cells[i * size + i] = 1;
    }

    bool at(std::size_t i, std::size_t j) const { return cells[i * n + j] != 0; }

    void connect(std::size_t i, std::size_t j) {
        cells[i * n + j] = 1;
        cells[j * n + i] = 1;
    }

    bool symmetric() const {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (cells[i * n + j] != cells[j * n + i]) return false;
        return true;
    }

    std::size_t degree(std::size_t i) const {
        std::size_t d = 0;
        for (std::size_t j = 0; j < n; ++j) d += cells[i * n + j] ? 1 : 0;
        return d;
    }

    // Edges off the diagonal, counting (i,j) and (j,i) separately.
    std::size_t directed_edge_count() const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && cells[i * n + j]) ++c;
        return c;
    }
};

}  // namespace sgb
