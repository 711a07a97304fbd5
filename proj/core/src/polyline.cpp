#include "robinfb/polyline.hpp"

#include <cmath>
#include <cstdint>
#include <map>

namespace robinfb {

namespace {

enum class Cls : std::uint8_t { Inside, Outside, Other };

struct FaceKey {
  // vertical faces (between x-adjacent cells) get kind 0, horizontal kind 1
  int kind;
  int i;
  int j;
  bool operator<(const FaceKey& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
};

struct FaceInfo {
  std::array<double, 2> mid;
  int link[2] = {-1, -1};  // adjacent face ids
  // terminal corners, when a chain ends here
  std::array<double, 2> term[2];
  bool has_term[2] = {false, false};
  bool term_contact[2] = {false, false};
  int nports = 0;
  bool used = false;

  void add_link(int other) { link[nports++] = other; }
  void add_term(std::array<double, 2> corner, bool contact) {
    term[nports] = corner;
    has_term[nports] = true;
    term_contact[nports] = contact;
    ++nports;
  }
};

template <class Classify>
std::vector<Chain> extract_chains(const State& st, Classify classify) {
  const Grid& g = st.grid;
  std::map<FaceKey, int> face_id;
  std::vector<FaceInfo> faces;

  auto cls = [&](int i, int j) -> Cls { return classify(st.lab(i, j)); };
  auto is_chain_face = [&](int kind, int i, int j) -> bool {
    if (kind == 0) {
      if (i < 0 || i + 1 >= g.nx || j < 0 || j >= g.ny) return false;
      const Cls a = cls(i, j), b = cls(i + 1, j);
      return (a == Cls::Inside && b == Cls::Outside) ||
             (a == Cls::Outside && b == Cls::Inside);
    }
    if (i < 0 || i >= g.nx || j < 0 || j + 1 >= g.ny) return false;
    const Cls a = cls(i, j), b = cls(i, j + 1);
    return (a == Cls::Inside && b == Cls::Outside) ||
           (a == Cls::Outside && b == Cls::Inside);
  };
  auto get_face = [&](int kind, int i, int j) -> int {
    const FaceKey key{kind, i, j};
    auto it = face_id.find(key);
    if (it != face_id.end()) return it->second;
    FaceInfo info;
    if (kind == 0)
      info.mid = {g.origin_x + (i + 1) * g.h, g.origin_y + (j + 0.5) * g.h};
    else
      info.mid = {g.origin_x + (i + 0.5) * g.h, g.origin_y + (j + 1) * g.h};
    const int id = static_cast<int>(faces.size());
    faces.push_back(info);
    face_id.emplace(key, id);
    return id;
  };

  // Visit every lattice corner and resolve the incident chain faces.
  for (int cj = 0; cj <= g.ny; ++cj) {
    for (int ci = 0; ci <= g.nx; ++ci) {
      // incident faces: S/N vertical, W/E horizontal
      const FaceKey fk[4] = {{0, ci - 1, cj - 1},
                             {0, ci - 1, cj},
                             {1, ci - 1, cj - 1},
                             {1, ci, cj - 1}};
      int ids[4];
      int k = 0;
      for (const FaceKey& f : fk)
        if (is_chain_face(f.kind, f.i, f.j)) ids[k++] = get_face(f.kind, f.i, f.j);
      if (k == 0) continue;

      bool terminator = false;
      bool contact = false;
      for (int dj = -1; dj <= 0 && !terminator; ++dj) {
        for (int di = -1; di <= 0; ++di) {
          const int i = ci + di, j = cj + dj;
          if (!g.in_bounds(i, j)) {
            terminator = true;
            break;
          }
          if (cls(i, j) == Cls::Other) {
            terminator = true;
            contact = true;
            break;
          }
        }
      }
      const std::array<double, 2> corner = {g.origin_x + ci * g.h,
                                            g.origin_y + cj * g.h};
      if (terminator) {
        for (int t = 0; t < k; ++t) faces[ids[t]].add_term(corner, contact);
      } else if (k == 2) {
        faces[ids[0]].add_link(ids[1]);
        faces[ids[1]].add_link(ids[0]);
      } else if (k == 4) {
        // saddle: pair S-W and N-E (fixed rule); incident order is S,N,W,E
        faces[ids[0]].add_link(ids[2]);
        faces[ids[2]].add_link(ids[0]);
        faces[ids[1]].add_link(ids[3]);
        faces[ids[3]].add_link(ids[1]);
      }
    }
  }

  std::vector<Chain> chains;
  auto walk = [&](int start, int port) {
    Chain c;
    c.start_contact = faces[start].term_contact[port];
    c.pts.push_back(faces[start].term[port]);
    int cur = start;
    int from = -1;
    while (true) {
      faces[cur].used = true;
      c.pts.push_back(faces[cur].mid);
      int next = -1;
      int term_port = -1;
      for (int p = 0; p < 2; ++p) {
        if (faces[cur].has_term[p] && (cur != start || p != port))
          term_port = p;
        else if (faces[cur].link[p] >= 0 && faces[cur].link[p] != from)
          next = faces[cur].link[p];
      }
      if (next < 0 || faces[next].used) {
        if (term_port >= 0) {
          c.end_contact = faces[cur].term_contact[term_port];
          c.pts.push_back(faces[cur].term[term_port]);
        }
        break;
      }
      from = cur;
      cur = next;
    }
    chains.push_back(std::move(c));
  };

  // open chains first
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].used) continue;
    for (int p = 0; p < 2; ++p) {
      if (faces[f].has_term[p]) {
        walk(static_cast<int>(f), p);
        break;
      }
    }
  }
  // remaining faces form closed loops
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].used) continue;
    Chain c;
    c.closed = true;
    int cur = static_cast<int>(f);
    int from = -1;
    while (cur >= 0 && !faces[cur].used) {
      faces[cur].used = true;
      c.pts.push_back(faces[cur].mid);
      int next = -1;
      for (int p = 0; p < 2; ++p)
        if (faces[cur].link[p] >= 0 && faces[cur].link[p] != from)
          next = faces[cur].link[p];
      from = cur;
      cur = next;
    }
    chains.push_back(std::move(c));
  }
  return chains;
}

}  // namespace

std::vector<Chain> extract_interface_chains(const State& st) {
  return extract_chains(st, [](Label l) {
    if (in_group1(l)) return Cls::Inside;
    if (in_group2(l)) return Cls::Outside;
    return Cls::Other;
  });
}

std::vector<Chain> extract_free_boundary_chains(const State& st) {
  return extract_chains(st, [](Label l) {
    return is_labeled(l) ? Cls::Inside : Cls::Outside;
  });
}

std::array<double, 2> principal_direction(
    const std::vector<std::array<double, 2>>& pts) {
  double mx = 0.0, my = 0.0;
  for (const auto& p : pts) {
    mx += p[0];
    my += p[1];
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : pts) {
    const double dx = p[0] - mx, dy = p[1] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxy == 0.0) return sxx >= syy ? std::array<double, 2>{1.0, 0.0}
                                    : std::array<double, 2>{0.0, 1.0};
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double l1 = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
  // eigenvector for the largest eigenvalue
  double vx = sxy, vy = l1 - sxx;
  const double n = std::hypot(vx, vy);
  if (n == 0.0) return {1.0, 0.0};
  return {vx / n, vy / n};
}

}  // namespace robinfb
