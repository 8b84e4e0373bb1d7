#pragma once

namespace nhfields {

/// Coordinate layout of J^1 over an (n+1)-dimensional base with rank-m fibres.
///
/// Flat index order is (x^0..x^n, y^1..y^m, v^a_mu) with the v-block a-major,
/// mu-minor. The same layout is used for points and tangent vectors.
struct JetLayout {
  int n = 1;
  int m = 1;

  constexpr int base_dim() const { return n + 1; }
  constexpr int jet_dim() const { return m * (n + 1); }
  constexpr int dim() const { return base_dim() + m + jet_dim(); }

  constexpr int x_index(int mu) const { return mu; }
  constexpr int y_index(int a) const { return n + 1 + a; }
  constexpr int v_offset() const { return n + 1 + m; }
  constexpr int v_index(int a, int mu) const { return v_offset() + a * (n + 1) + mu; }
  // Position inside the v-block only.
  constexpr int v_flat(int a, int mu) const { return a * (n + 1) + mu; }

  bool operator==(const JetLayout&) const = default;

  void validate() const;
};

struct Dims {
  JetLayout layout;
  int k = 0;

  void validate() const;
};

}  // namespace nhfields
