#include "firenav/bt/bt.hpp"

#include <charconv>
#include <cstdlib>

namespace firenav::bt {

const char* to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Success: return "SUCCESS";
    case NodeStatus::Failure: return "FAILURE";
    case NodeStatus::Running: return "RUNNING";
  }
  return "?";
}

const char* to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Active: return "ACTIVE";
    case TaskStatus::Succeeded: return "SUCCEEDED";
    case TaskStatus::Canceled: return "CANCELED";
    case TaskStatus::Aborted: return "ABORTED";
    case TaskStatus::Preempted: return "PREEMPTED";
  }
  return "?";
}

NodeStatus map_task_status(TaskStatus s) {
  switch (s) {
    case TaskStatus::Active: return NodeStatus::Running;
    case TaskStatus::Succeeded: return NodeStatus::Success;
    case TaskStatus::Canceled:
    case TaskStatus::Aborted:
    case TaskStatus::Preempted: return NodeStatus::Failure;
  }
  return NodeStatus::Failure;
}

double ParamValue::as_number(const Blackboard& bb) const {
  if (is_blackboard_ref) return bb.get<double>(text);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || (end && *end != '\0'))
    throw BlackboardError("not a number: " + text);
  return v;
}

std::string ParamValue::as_string(const Blackboard& bb) const {
  if (is_blackboard_ref) return bb.get<std::string>(text);
  return text;
}

NodeStatus BtNode::tick(TickContext& ctx) {
  const NodeStatus s = do_tick(ctx);
  if (!last_logged_ || *last_logged_ != s) {
    ctx.emit("bt_node", name() + " " + to_string(s));
    last_logged_ = s;
  }
  return s;
}

NodeStatus SequenceNode::do_tick(TickContext& ctx) {
  while (current_ < children_.size()) {
    const NodeStatus s = children_[current_]->tick(ctx);
    if (s == NodeStatus::Running) return NodeStatus::Running;
    if (s == NodeStatus::Failure) {
      current_ = 0;
      return NodeStatus::Failure;
    }
    ++current_;
  }
  current_ = 0;
  return NodeStatus::Success;
}

void SequenceNode::halt(TickContext& ctx) {
  if (current_ < children_.size()) children_[current_]->halt(ctx);
  current_ = 0;
}

NodeStatus ParallelNode::do_tick(TickContext& ctx) {
  if (done_.size() != children_.size())
    done_.assign(children_.size(), std::nullopt);

  int successes = 0;
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (!done_[i]) {
      const NodeStatus s = children_[i]->tick(ctx);
      if (s != NodeStatus::Running) done_[i] = s;
    }
    if (done_[i] && *done_[i] == NodeStatus::Success) ++successes;
  }

  if (successes >= threshold_) {
    // Preempt whatever is still running.
    for (std::size_t i = 0; i < children_.size(); ++i) {
      if (!done_[i]) {
        children_[i]->halt(ctx);
        ctx.emit("preemption", children_[i]->name());
      }
    }
    done_.assign(children_.size(), std::nullopt);
    return NodeStatus::Success;
  }

  bool all_done = true;
  for (const auto& d : done_)
    if (!d) all_done = false;
  if (all_done) {
    done_.assign(children_.size(), std::nullopt);
    return NodeStatus::Failure;
  }
  return NodeStatus::Running;
}

void ParallelNode::halt(TickContext& ctx) {
  for (std::size_t i = 0; i < children_.size(); ++i)
    if (i >= done_.size() || !done_[i]) children_[i]->halt(ctx);
  done_.clear();
}

NodeStatus ForceSuccessNode::do_tick(TickContext& ctx) {
  const NodeStatus s = children_.front()->tick(ctx);
  if (s == NodeStatus::Running) return NodeStatus::Running;
  return NodeStatus::Success;
}

void ForceSuccessNode::halt(TickContext& ctx) { children_.front()->halt(ctx); }

NodeStatus CheckBoolNode::do_tick(TickContext& ctx) {
  try {
    return ctx.blackboard->get<bool>(key_) ? NodeStatus::Success
                                           : NodeStatus::Failure;
  } catch (const BlackboardError& e) {
    ctx.emit("bt_error", std::string(e.what()) + " (node " + name() + ")");
    return NodeStatus::Failure;
  }
}

NodeStatus MathOperationFloatNode::do_tick(TickContext& ctx) {
  try {
    const double a = in_.as_number(*ctx.blackboard);
    const double b = in2_.as_number(*ctx.blackboard);
    double r = 0.0;
    if (op_ == "add") r = a + b;
    else if (op_ == "sub") r = a - b;
    else if (op_ == "mul") r = a * b;
    else throw BlackboardError("unknown op: " + op_);
    ctx.blackboard->set(out_, r);
    ctx.emit("blackboard_write", out_ + "=" + std::to_string(r));
    return NodeStatus::Success;
  } catch (const BlackboardError& e) {
    ctx.emit("bt_error", std::string(e.what()) + " (node " + name() + ")");
    return NodeStatus::Failure;
  }
}

NodeStatus ActionNode::do_tick(TickContext& ctx) {
  if (!handle_) {
    ResolvedParams resolved;
    try {
      for (const auto& [key, value] : params_) {
        // Numbers resolve when they can; everything else passes as string.
        if (value.is_blackboard_ref) {
          resolved.numbers[key] = value.as_number(*ctx.blackboard);
        } else {
          char* end = nullptr;
          const double v = std::strtod(value.text.c_str(), &end);
          if (end != value.text.c_str() && end && *end == '\0')
            resolved.numbers[key] = v;
          else
            resolved.strings[key] = value.text;
        }
      }
    } catch (const BlackboardError& e) {
      ctx.emit("bt_error", std::string(e.what()) + " (node " + name() + ")");
      return NodeStatus::Failure;
    }
    handle_ = ctx.tasks->start(task_, resolved, ctx);
    ctx.emit("task_start", task_ + " (" + name() + ")");
  }
  const TaskStatus ts = ctx.tasks->poll(*handle_);
  const NodeStatus ns = map_task_status(ts);
  if (ns != NodeStatus::Running) {
    ctx.emit("task_status", task_ + " " + to_string(ts));
    handle_.reset();
  }
  return ns;
}

void ActionNode::halt(TickContext& ctx) {
  if (handle_) {
    ctx.tasks->preempt(*handle_);
    const TaskStatus ts = ctx.tasks->poll(*handle_);
    ctx.emit("task_status", task_ + " " + to_string(ts));
    handle_.reset();
  }
}

}  // namespace firenav::bt
