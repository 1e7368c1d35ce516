#pragma once

#include <cstddef>
#include <string>

namespace ucgan::nn {

/// N×C×H×W extent of a dense tensor. Every tensor in the engine is 4-D.
struct Shape {
  std::size_t n = 1;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  constexpr std::size_t numel() const { return n * c * h * w; }
  constexpr std::size_t plane() const { return h * w; }
  constexpr std::size_t offset(std::size_t in, std::size_t ic, std::size_t ih,
                               std::size_t iw) const {
    return ((in * c + ic) * h + ih) * w + iw;
  }
  constexpr bool operator==(const Shape&) const = default;

  std::string str() const {
    return "(" + std::to_string(n) + ", " + std::to_string(c) + ", " + std::to_string(h) +
           ", " + std::to_string(w) + ")";
  }
};

}  // namespace ucgan::nn
