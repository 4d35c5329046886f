#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "firenav/core/events.hpp"
#include "firenav/core/geometry.hpp"

namespace firenav::bt {

enum class NodeStatus { Success, Failure, Running };
enum class TaskStatus { Active, Succeeded, Canceled, Aborted, Preempted };

const char* to_string(NodeStatus s);
const char* to_string(TaskStatus s);

/// ACTIVE -> RUNNING, SUCCEEDED -> SUCCESS, everything terminal-negative
/// (CANCELED, ABORTED, PREEMPTED) -> FAILURE.
NodeStatus map_task_status(TaskStatus s);

class BlackboardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed key->value store shared by the nodes of one tree. Reading an
/// unset key is an error, never a default.
class Blackboard {
 public:
  using Value = std::variant<bool, double, Vec3, std::string>;

  void set(const std::string& key, Value value) { store_[key] = std::move(value); }
  bool has(const std::string& key) const { return store_.count(key) > 0; }

  template <typename T>
  T get(const std::string& key) const {
    const auto it = store_.find(key);
    if (it == store_.end())
      throw BlackboardError("unset blackboard key: " + key);
    const T* v = std::get_if<T>(&it->second);
    if (!v) throw BlackboardError("blackboard type mismatch for key: " + key);
    return *v;
  }

  const std::map<std::string, Value>& raw() const { return store_; }

 private:
  std::map<std::string, Value> store_;
};

/// A leaf parameter: literal text/number or a blackboard reference
/// ("@key"), resolved at tick time.
struct ParamValue {
  std::string text;
  bool is_blackboard_ref = false;

  double as_number(const Blackboard& bb) const;
  std::string as_string(const Blackboard& bb) const;
};

using ParamMap = std::map<std::string, ParamValue>;

/// Parameters resolved against the blackboard at task-start time.
struct ResolvedParams {
  std::map<std::string, double> numbers;
  std::map<std::string, std::string> strings;

  double number_or(const std::string& key, double fallback) const {
    const auto it = numbers.find(key);
    return it == numbers.end() ? fallback : it->second;
  }
  std::string string_or(const std::string& key,
                        const std::string& fallback) const {
    const auto it = strings.find(key);
    return it == strings.end() ? fallback : it->second;
  }
};

class TickContext;

/// Task execution backend: starts the five atomic tasks and reports their
/// five-state lifecycle. Implementations live with the robot runtime; tests
/// use scripted fakes.
class TaskRuntime {
 public:
  virtual ~TaskRuntime() = default;
  virtual int start(const std::string& task, const ResolvedParams& params,
                    TickContext& ctx) = 0;
  virtual TaskStatus poll(int handle) = 0;
  virtual void preempt(int handle) = 0;
};

class TickContext {
 public:
  Blackboard* blackboard = nullptr;
  TaskRuntime* tasks = nullptr;
  EventLog* log = nullptr;  // optional
  double time = 0.0;
  std::string robot;

  void emit(const std::string& kind, const std::string& detail) {
    if (log) log->emit(time, robot, kind, detail);
  }
};

class BtNode {
 public:
  explicit BtNode(std::string name) : name_(std::move(name)) {}
  virtual ~BtNode() = default;

  const std::string& name() const { return name_; }
  virtual const char* type() const = 0;

  NodeStatus tick(TickContext& ctx);

  /// Preempts anything running below this node.
  virtual void halt(TickContext& ctx) = 0;

  virtual const std::vector<std::unique_ptr<BtNode>>& children() const {
    static const std::vector<std::unique_ptr<BtNode>> kNone;
    return kNone;
  }

 protected:
  virtual NodeStatus do_tick(TickContext& ctx) = 0;

 private:
  std::string name_;
  std::optional<NodeStatus> last_logged_;
};

class CompositeNode : public BtNode {
 public:
  CompositeNode(std::string name, std::vector<std::unique_ptr<BtNode>> kids)
      : BtNode(std::move(name)), children_(std::move(kids)) {}
  const std::vector<std::unique_ptr<BtNode>>& children() const override {
    return children_;
  }

 protected:
  std::vector<std::unique_ptr<BtNode>> children_;
};

/// Ticks children in order; FAILURE on the first child failure, RUNNING on
/// the first running child, SUCCESS once all succeed. Completed children
/// are not re-ticked within one activation.
class SequenceNode : public CompositeNode {
 public:
  using CompositeNode::CompositeNode;
  const char* type() const override { return "Sequence"; }
  void halt(TickContext& ctx) override;

 protected:
  NodeStatus do_tick(TickContext& ctx) override;

 private:
  std::size_t current_ = 0;
};

/// Ticks all children every tick; SUCCESS as soon as success_threshold
/// children have succeeded (preempting the rest), FAILURE when all children
/// finished below the threshold.
class ParallelNode : public CompositeNode {
 public:
  ParallelNode(std::string name, std::vector<std::unique_ptr<BtNode>> kids,
               int success_threshold)
      : CompositeNode(std::move(name), std::move(kids)),
        threshold_(success_threshold) {}
  const char* type() const override { return "Parallel"; }
  void halt(TickContext& ctx) override;

 protected:
  NodeStatus do_tick(TickContext& ctx) override;

 private:
  int threshold_ = 1;
  std::vector<std::optional<NodeStatus>> done_;
};

/// Decorator: the child's FAILURE becomes SUCCESS.
class ForceSuccessNode : public CompositeNode {
 public:
  using CompositeNode::CompositeNode;
  const char* type() const override { return "ForceSuccess"; }
  void halt(TickContext& ctx) override;

 protected:
  NodeStatus do_tick(TickContext& ctx) override;
};

/// SUCCESS iff the blackboard key holds true.
class CheckBoolNode : public BtNode {
 public:
  CheckBoolNode(std::string name, std::string key)
      : BtNode(std::move(name)), key_(std::move(key)) {}
  const char* type() const override { return "CheckBool"; }
  void halt(TickContext&) override {}

 protected:
  NodeStatus do_tick(TickContext& ctx) override;

 private:
  std::string key_;
};

/// Computes out = op(in, in2) over blackboard/literal floats and writes the
/// result back; supports add, sub, mul.
class MathOperationFloatNode : public BtNode {
 public:
  MathOperationFloatNode(std::string name, std::string op, ParamValue in,
                         ParamValue in2, std::string out)
      : BtNode(std::move(name)),
        op_(std::move(op)),
        in_(std::move(in)),
        in2_(std::move(in2)),
        out_(std::move(out)) {}
  const char* type() const override { return "MathOperationFloat"; }
  void halt(TickContext&) override {}

 protected:
  NodeStatus do_tick(TickContext& ctx) override;

 private:
  std::string op_;
  ParamValue in_, in2_;
  std::string out_;
};

/// Runs one atomic task through the TaskRuntime, mapping its five-state
/// lifecycle onto node statuses.
class ActionNode : public BtNode {
 public:
  ActionNode(std::string name, std::string task, ParamMap params)
      : BtNode(std::move(name)),
        task_(std::move(task)),
        params_(std::move(params)) {}
  const char* type() const override { return "Action"; }
  void halt(TickContext& ctx) override;
  const std::string& task() const { return task_; }

 protected:
  NodeStatus do_tick(TickContext& ctx) override;

 private:
  std::string task_;
  ParamMap params_;
  std::optional<int> handle_;
};

}  // namespace firenav::bt
