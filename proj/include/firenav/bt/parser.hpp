#pragma once

#include <memory>
#include <string>

#include "firenav/bt/bt.hpp"

namespace firenav::bt {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loads a mission tree from the nested-block text format:
///
///   # comment
///   Sequence name=Mission {
///     Action name=TakeOff task=TakeOff height=3.0
///     Parallel name=Explore threshold=1 {
///       Action task=GoToGoal path="0,0,3|8,0,3"
///       Action task=FireDetection3D duration=90 camera=nadir
///     }
///     CheckBool key=fd_found
///     MathOperationFloat op=add in=@fd_z in2=3.0 out=attack_z
///     Subtree file=goto_land.bt home_x=0 home_y=0
///   }
///
/// Values starting with '@' are blackboard references resolved at tick
/// time; '$name' placeholders inside an included file are substituted from
/// the Subtree attributes. Leaves cannot have children; includes cannot be
/// cyclic. Errors carry file and line.
std::unique_ptr<BtNode> parse_tree(const std::string& path);

/// Same grammar from an in-memory string (used by tests).
std::unique_ptr<BtNode> parse_tree_text(const std::string& text,
                                        const std::string& origin = "<text>");

}  // namespace firenav::bt
