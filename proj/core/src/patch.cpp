#include "tdict/patch.hpp"

#include <string>

#include "tdict/errors.hpp"

namespace tdict {

PatchGrid PatchGrid::for_image(Index rows, Index cols, Index p, Index q) {
  if (p < 1 || q < 1) throw ShapeError("patch size must be positive");
  if (rows < 1 || cols < 1) throw ShapeError("image must be non-empty");
  if (rows % p != 0 || cols % q != 0) {
    throw ShapeError("image " + std::to_string(rows) + "x" + std::to_string(cols) + " is not divisible into " +
                     std::to_string(p) + "x" + std::to_string(q) + " patches");
  }
  return PatchGrid{p, q, rows / p, cols / q};
}

Tensor3 patchify(const ImageGray& image, Index p, Index q) {
  const PatchGrid g = PatchGrid::for_image(image.rows(), image.cols(), p, q);
  Tensor3 t(p, g.patches(), q);
  for (Index c = 0; c < g.n_c; ++c) {
    for (Index r = 0; r < g.n_r; ++r) {
      const Index j = g.slice_of(r, c);
      for (Index k = 0; k < q; ++k) {
        for (Index i = 0; i < p; ++i) t(i, j, k) = image(r * p + i, c * q + k);
      }
    }
  }
  return t;
}

ImageGray depatchify(const Tensor3& patches, const PatchGrid& g) {
  if (patches.rows() != g.p || patches.cols() != g.patches() || patches.tubes() != g.q) {
    throw ShapeError("depatchify: tensor " + std::to_string(patches.rows()) + "x" + std::to_string(patches.cols()) +
                     "x" + std::to_string(patches.tubes()) + " does not match grid " + std::to_string(g.p) + "x" +
                     std::to_string(g.patches()) + "x" + std::to_string(g.q));
  }
  ImageGray image(g.image_rows(), g.image_cols());
  for (Index c = 0; c < g.n_c; ++c) {
    for (Index r = 0; r < g.n_r; ++r) {
      const Index j = g.slice_of(r, c);
      for (Index k = 0; k < g.q; ++k) {
        for (Index i = 0; i < g.p; ++i) image(r * g.p + i, c * g.q + k) = patches(i, j, k);
      }
    }
  }
  return image;
}

Tensor3 patchify_color(const ImageRgb& image, Index p, Index q) {
  for (const auto& ch : image.channels) {
    if (ch.rows() != image.rows() || ch.cols() != image.cols()) throw ShapeError("patchify_color: channel sizes differ");
  }
  const std::array<Tensor3, 3> parts{patchify(image.channels[0], p, q), patchify(image.channels[1], p, q),
                                     patchify(image.channels[2], p, q)};
  return concat_lateral(parts);
}

ImageRgb depatchify_color(const Tensor3& patches, const PatchGrid& g) {
  if (patches.cols() != 3 * g.patches()) {
    throw ShapeError("depatchify_color: expected " + std::to_string(3 * g.patches()) + " lateral slices, got " +
                     std::to_string(patches.cols()));
  }
  ImageRgb out;
  for (Index ch = 0; ch < 3; ++ch) {
    out.channels[static_cast<std::size_t>(ch)] = depatchify(patches.lateral_block(ch * g.patches(), g.patches()), g);
  }
  return out;
}

std::vector<Index> perm_map(const PatchGrid& g) {
  std::vector<Index> pi(static_cast<std::size_t>(g.pixels()));
  const Index rows = g.image_rows();
  for (Index c = 0; c < g.n_c; ++c) {
    for (Index r = 0; r < g.n_r; ++r) {
      const Index j = g.slice_of(r, c);
      for (Index k = 0; k < g.q; ++k) {
        for (Index i = 0; i < g.p; ++i) {
          const Index t = (i + g.p * k) + g.p * g.q * j;
          pi[static_cast<std::size_t>(t)] = (r * g.p + i) + rows * (c * g.q + k);
        }
      }
    }
  }
  return pi;
}

}  // namespace tdict
