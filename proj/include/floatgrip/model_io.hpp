#pragma once

// Line-oriented model files.
//
//   material <name> stiffness=<N/m> damping=<N*s/m> friction=<mu>
//   link <name> parent=<name|world> joint=<free|revolute|prismatic|fixed>
//        axis=<x,y,z> pos=<x,y,z> quat=<w,x,y,z> mass=<kg> com=<x,y,z>
//        inertia=<ixx,iyy,izz,ixy,ixz,iyz> [limits=<lo,hi>] [damping=<d>]
//        [actuated] [couple=<group>:<ratio>] [kp=<k>] [kv=<d>] [taumax=<t>]
//        [grip=<open,close>]
//   geom <link|world> shape=<sphere|capsule|cylinder|box> size=<...>
//        pos=<x,y,z> quat=<w,x,y,z> material=<name>
//
// Everything after `#` is a comment. Each directive occupies one line.

#include <string>
#include <string_view>

#include "floatgrip/model.hpp"

namespace floatgrip {

/// Parses and validates. Throws ParseError with the line/column of the
/// offending token (syntax) or declaration (semantic).
ModelDef parse_model(std::string_view text);

/// Canonical text: materials, links, geoms in declaration order, floats in
/// shortest round-trip form.
std::string serialize_model(const ModelDef& model);

/// Field-by-field equality of the declared (non-derived) content.
bool structurally_equal(const ModelDef& a, const ModelDef& b);

}  // namespace floatgrip
