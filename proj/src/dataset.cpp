#include "structlearn/dataset.hpp"

#include "structlearn/error.hpp"

namespace structlearn {

std::string_view to_string(TaskKind task) noexcept {
    switch (task) {
    case TaskKind::sequence: return "sequence";
    case TaskKind::deptree: return "deptree";
    case TaskKind::multiclass: return "multiclass";
    }
    return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
    if (name == "sequence") return TaskKind::sequence;
    if (name == "deptree") return TaskKind::deptree;
    if (name == "multiclass") return TaskKind::multiclass;
    throw ContractError("unknown task '" + std::string(name) + "'");
}

}  // namespace structlearn
