#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "monofd/errors.hpp"
#include "monofd/geometry.hpp"
#include "monofd/point_cloud.hpp"

namespace monofd {

/// Regular lattice of `side` points per axis on the box [lo, hi], split into
/// simplices; the neighbour graph links lattice points within Chebyshev
/// distance rho. Metrics are set from the lattice geometry.
template <int Dim>
PointCloud<Dim> build_regular_grid(int side, const Vec<Dim>& lo, const Vec<Dim>& hi, int rho = 1) {
    if (rho < 1 || side < 2 * rho + 1) throw std::invalid_argument("grid needs at least 2*rho+1 points per side");
    Lattice<Dim> lat;
    lat.counts.fill(side);
    lat.origin = lo;
    lat.spacing = (hi - lo) / static_cast<double>(side - 1);
    const int n = lat.size();
    std::vector<Vec<Dim>> pts(n);
    std::vector<char> bdry(n, 0);
    for (int f = 0; f < n; ++f) {
        const auto idx = lat.unflat(f);
        pts[f] = lat.position(idx);
        for (int d = 0; d < Dim; ++d)
            if (idx[d] == 0 || idx[d] == side - 1) bdry[f] = 1;
    }
    std::vector<Cell<Dim>> cells;
    if constexpr (Dim == 2) {
        for (int j = 0; j + 1 < side; ++j) {
            for (int i = 0; i + 1 < side; ++i) {
                const int a = lat.flat({i, j}), b = lat.flat({i + 1, j});
                const int c = lat.flat({i + 1, j + 1}), d = lat.flat({i, j + 1});
                cells.push_back({a, b, c});
                cells.push_back({a, c, d});
            }
        }
    } else {
        // Kuhn split of each cube into six tetrahedra along the main diagonal.
        const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
        for (int k = 0; k + 1 < side; ++k) {
            for (int j = 0; j + 1 < side; ++j) {
                for (int i = 0; i + 1 < side; ++i) {
                    for (const auto& p : perms) {
                        std::array<int, 3> idx{i, j, k};
                        Cell<3> c;
                        c[0] = lat.flat(idx);
                        for (int s = 0; s < 3; ++s) {
                            idx[p[s]] += 1;
                            c[s + 1] = lat.flat(idx);
                        }
                        cells.push_back(c);
                    }
                }
            }
        }
    }
    PointCloud<Dim> cloud(std::move(pts), std::move(bdry), std::move(cells));
    std::vector<std::vector<int>> adj(n);
    std::vector<std::array<int, Dim>> offsets;
    {
        std::array<int, Dim> o{};
        auto rec = [&](auto&& self, int d) -> void {
            if (d == Dim) {
                bool zero = true;
                for (int v : o) zero = zero && v == 0;
                if (!zero) offsets.push_back(o);
                return;
            }
            for (int v = -rho; v <= rho; ++v) {
                o[d] = v;
                self(self, d + 1);
            }
        };
        rec(rec, 0);
    }
    for (int f = 0; f < n; ++f) {
        const auto idx = lat.unflat(f);
        for (const auto& o : offsets) {
            std::array<int, Dim> j;
            for (int d = 0; d < Dim; ++d) j[d] = idx[d] + o[d];
            if (lat.contains(j)) adj[f].push_back(lat.flat(j));
        }
    }
    cloud.set_adjacency(std::move(adj));
    cloud.set_lattice(lat);

    CloudMetrics m;
    const double smin = lat.spacing.minCoeff();
    m.h = 0.5 * lat.spacing.norm();
    if constexpr (Dim == 2) {
        m.h_boundary = 0.5 * lat.spacing.maxCoeff();
    } else {
        double hb = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) hb = std::max(hb, 0.5 * std::hypot(lat.spacing[a], lat.spacing[b]));
        m.h_boundary = hb;
    }
    m.delta = smin;
    m.min_edge = smin;
    cloud.set_metrics(m);
    return cloud;
}

/// Rigid rotation about the origin (2-D).
inline PointCloud<2> rotate_cloud(const PointCloud<2>& cloud, double angle) {
    const Mat<2> R = Eigen::Rotation2Dd(angle).toRotationMatrix();
    std::vector<Vec<2>> pts;
    pts.reserve(cloud.size());
    for (const auto& p : cloud.points()) pts.push_back(R * p);
    PointCloud<2> out(std::move(pts), cloud.boundary_mask(), cloud.cells());
    out.set_adjacency(cloud.adjacency());
    if (cloud.lattice()) {
        Lattice<2> lat = *cloud.lattice();
        lat.origin = R * lat.origin;
        lat.rotation = R * lat.rotation;
        out.set_lattice(lat);
    }
    out.set_metrics(cloud.metrics());
    return out;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
T parse_number(std::string_view tok, std::size_t line) {
    T v{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError("bad number '" + std::string(tok) + "'", line);
    return v;
}

}  // namespace detail

/// Text mesh format: `DIM n`, then sections `POINTS k`, `BOUNDARY m` and
/// `CELLS c` with one record per line; '#' starts a comment.
template <int Dim>
void write_mesh(const PointCloud<Dim>& cloud, std::ostream& os) {
    os << "DIM " << Dim << "\n";
    os << "POINTS " << cloud.size() << "\n";
    for (const auto& p : cloud.points()) {
        for (int d = 0; d < Dim; ++d) os << (d ? " " : "") << detail::format_double(p[d]);
        os << "\n";
    }
    const auto bdry = cloud.boundary_points();
    os << "BOUNDARY " << bdry.size() << "\n";
    for (int i : bdry) os << i << "\n";
    os << "CELLS " << cloud.cells().size() << "\n";
    for (const auto& c : cloud.cells()) {
        for (int a = 0; a <= Dim; ++a) os << (a ? " " : "") << c[a];
        os << "\n";
    }
}

template <int Dim>
void write_mesh(const PointCloud<Dim>& cloud, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_mesh(cloud, os);
    if (!os) throw Error("write failed: " + path);
}

template <int Dim>
PointCloud<Dim> read_mesh(std::istream& is) {
    std::vector<std::pair<std::size_t, std::vector<std::string_view>>> records;
    std::vector<std::string> lines;
    {
        std::string line;
        while (std::getline(is, line)) lines.push_back(line);
    }
    for (std::size_t k = 0; k < lines.size(); ++k) {
        std::string_view v = lines[k];
        if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
        auto toks = detail::split_tokens(v);
        if (!toks.empty()) records.push_back({k + 1, std::move(toks)});
    }
    std::size_t r = 0;
    auto header = [&](std::string_view name) -> long long {
        if (r >= records.size()) throw ParseError("missing section " + std::string(name), lines.size());
        const auto& [ln, toks] = records[r];
        if (toks.size() != 2 || toks[0] != name) throw ParseError("expected '" + std::string(name) + " <count>'", ln);
        const long long count = detail::parse_number<long long>(toks[1], ln);
        if (count < 0) throw ParseError("negative count", ln);
        ++r;
        return count;
    };
    const long long dim = header("DIM");
    if (dim != Dim) throw ParseError("dimension mismatch", records[r - 1].first);

    const long long np = header("POINTS");
    std::vector<Vec<Dim>> pts(np);
    for (long long k = 0; k < np; ++k, ++r) {
        if (r >= records.size()) throw ParseError("truncated POINTS section", lines.size());
        const auto& [ln, toks] = records[r];
        if (toks.size() != Dim) throw ParseError("expected " + std::to_string(Dim) + " coordinates", ln);
        for (int d = 0; d < Dim; ++d) pts[k][d] = detail::parse_number<double>(toks[d], ln);
    }

    const long long nb = header("BOUNDARY");
    std::vector<char> bdry(np, 0);
    for (long long k = 0; k < nb; ++r) {
        if (r >= records.size()) throw ParseError("truncated BOUNDARY section", lines.size());
        const auto& [ln, toks] = records[r];
        for (const auto& t : toks) {
            if (k >= nb) throw ParseError("too many boundary indices", ln);
            const long long id = detail::parse_number<long long>(t, ln);
            if (id < 0 || id >= np) throw TopologyError("boundary index " + std::to_string(id) + " out of range at line " + std::to_string(ln));
            bdry[id] = 1;
            ++k;
        }
    }

    const long long nc = header("CELLS");
    std::vector<Cell<Dim>> cells(nc);
    for (long long k = 0; k < nc; ++k, ++r) {
        if (r >= records.size()) throw ParseError("truncated CELLS section", lines.size());
        const auto& [ln, toks] = records[r];
        if (toks.size() != Dim + 1) throw ParseError("expected " + std::to_string(Dim + 1) + " cell indices", ln);
        for (int a = 0; a <= Dim; ++a) {
            const long long id = detail::parse_number<long long>(toks[a], ln);
            if (id < 0 || id >= np) throw TopologyError("cell references missing point " + std::to_string(id) + " at line " + std::to_string(ln));
            cells[k][a] = static_cast<int>(id);
        }
    }
    if (r != records.size()) throw ParseError("trailing content", records[r].first);

    PointCloud<Dim> cloud(std::move(pts), std::move(bdry), std::move(cells));
    cloud.compute_metrics();
    return cloud;
}

template <int Dim>
PointCloud<Dim> read_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    return read_mesh<Dim>(is);
}

/// Bisects boundary edges (splitting every cell that contains them) until
/// the boundary covering radius is at most `target_h_B`. Interior points
/// and their ids are kept.
template <int Dim>
PointCloud<Dim> augment_boundary(const PointCloud<Dim>& cloud, double target_h_B) {
    if (!(target_h_B > 0.0)) throw std::invalid_argument("target boundary resolution must be positive");
    std::vector<Vec<Dim>> pts = cloud.points();
    std::vector<char> bdry = cloud.boundary_mask();
    std::vector<Cell<Dim>> cells = cloud.cells();
    PointCloud<Dim> current = cloud;
    if (current.metrics().h_boundary == 0.0) current.compute_metrics();
    for (int pass = 0; pass < 64 && current.metrics().h_boundary > target_h_B; ++pass) {
        std::set<std::pair<int, int>> edges;
        for (const auto& f : current.boundary_facets())
            for (int a = 0; a < Dim; ++a)
                for (int b = a + 1; b < Dim; ++b) edges.insert({std::min(f.vertices[a], f.vertices[b]), std::max(f.vertices[a], f.vertices[b])});
        double longest = 0.0;
        for (const auto& [a, b] : edges) longest = std::max(longest, (pts[a] - pts[b]).norm());
        // 2-D: an edge of length L has covering radius L/2.
        const double cut = std::min(2.0 * target_h_B, longest * (1.0 - 1e-12));
        for (const auto& [a, b] : edges) {
            if ((pts[a] - pts[b]).norm() < cut) continue;
            const int m = static_cast<int>(pts.size());
            pts.push_back(0.5 * (pts[a] + pts[b]));
            bdry.push_back(1);
            const std::size_t nc = cells.size();
            for (std::size_t c = 0; c < nc; ++c) {
                auto& cell = cells[c];
                const auto ia = std::find(cell.begin(), cell.end(), a);
                const auto ib = std::find(cell.begin(), cell.end(), b);
                if (ia == cell.end() || ib == cell.end()) continue;
                Cell<Dim> other = cell;
                *ia = m;
                other[ib - cell.begin()] = m;
                cells.push_back(other);
            }
        }
        current = PointCloud<Dim>(pts, bdry, cells);
        current.compute_metrics();
    }
    return current;
}

}  // namespace monofd
