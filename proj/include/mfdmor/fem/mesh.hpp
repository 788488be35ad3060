// Copyright (c) the mfd-mor project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mfdmor::fem {

/// Hex8 mesh with named node sets. Coordinates in mm.
///
/// Element node ordering (VTK hexahedron): bottom face counterclockwise
/// (---, +--, ++-, -+-), then the top face (--+, +-+, +++, -++).
struct Mesh {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<std::array<int, 8>> elements;
  std::map<std::string, std::vector<int>> node_sets;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }

  const std::vector<int>& node_set(const std::string& name) const;
  bool has_node_set(const std::string& name) const { return node_sets.count(name) > 0; }

  /// Nearest node to a query point (Euclidean).
  int nearest_node(const Eigen::Vector3d& x) const;

  /// Checks connectivity ranges and positive Jacobians at all Gauss points.
  void validate() const;

  /// Stable FNV-1a hash over coordinates and connectivity.
  std::uint64_t fingerprint() const;
};

/// Regular bar [0,Lx] x [0,Ly] x [0,Lz] with nx x ny x nz elements.
/// Node sets: xmin, xmax, ymin, ymax, zmin, zmax.
Mesh make_bar(int nx, int ny, int nz, double lx, double ly, double lz);

struct NotchedPlateSpec {
  double length = 60.0;     // x extent
  double height = 40.0;     // y extent
  double thickness = 1.0;   // z extent
  double notch_width = 4.0;
  double notch_depth = 14.0;
  double lower_notch_x = 40.0;  // slot cut from y = 0
  double upper_notch_x = 20.0;  // slot cut from y = height
  int nx = 45;
  int ny = 30;
  int nz = 1;
};

/// Asymmetrically double-notched plate: structured grid minus the two slot
/// regions. Node sets: xmin, xmax, ymin, ymax, zmin, zmax.
Mesh make_notched_plate(const NotchedPlateSpec& spec = {});

struct IShapeSpec {
  double half_length = 50.0;   // y extent of the one-eighth model
  double gauge_half_width = 5.0;
  double grip_half_width = 10.0;
  double gauge_end = 25.0;     // y where the shoulder starts
  double grip_start = 35.0;    // y where the grip width is reached
  double half_thickness = 1.5;
  int nx = 6;
  int ny = 40;
  int nz = 2;
};

/// One-eighth of a flat I-shaped (dog-bone) specimen, widening from the
/// gauge section to the grip. Node sets: xmin, ymin, zmin, ymax.
Mesh make_ishape(const IShapeSpec& spec = {});

/// Plain-text mesh format:
///   nodes N elements E
///   <N lines: id x y z>
///   <E lines: id n1 ... n8>
///   set <name> <count>
///   <count node ids, whitespace separated>
Mesh read_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, const std::string& path);

}  // namespace mfdmor::fem
