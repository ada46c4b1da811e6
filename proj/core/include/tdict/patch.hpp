#pragma once

#include <vector>

#include "tdict/image.hpp"
#include "tdict/tensor3.hpp"

namespace tdict {

/// Non-overlapping tiling of an image into p x q patches.
struct PatchGrid {
  Index p = 1;
  Index q = 1;
  Index n_r = 1;  ///< patches down
  Index n_c = 1;  ///< patches across

  /// Throws ShapeError unless p divides rows and q divides cols.
  static PatchGrid for_image(Index rows, Index cols, Index p, Index q);

  Index image_rows() const { return p * n_r; }
  Index image_cols() const { return q * n_c; }
  Index patches() const { return n_r * n_c; }
  Index pixels() const { return image_rows() * image_cols(); }

  /// Lateral slice holding patch (r, c), counting patches down columns first.
  Index slice_of(Index r, Index c) const { return c * n_r + r; }

  bool operator==(const PatchGrid&) const = default;
};

/// Image to p x M x q tensor. Patch (r, c) is lateral slice c * n_r + r and
/// its pixel (i, k) lands at (i, slice, k).
Tensor3 patchify(const ImageGray& image, Index p, Index q);
ImageGray depatchify(const Tensor3& patches, const PatchGrid& grid);

/// Channels patchified separately and concatenated laterally: R occupies
/// slices [0, M), G [M, 2M), B [2M, 3M).
Tensor3 patchify_color(const ImageRgb& image, Index p, Index q);
ImageRgb depatchify_color(const Tensor3& patches, const PatchGrid& grid);

/// Permutation pi with vec(image)[pi[t]] == vec(unfold(patchify(image)))[t]
/// for every t, vec being column-major.
std::vector<Index> perm_map(const PatchGrid& grid);

}  // namespace tdict
