#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace structlearn {

enum class TaskKind : unsigned char { sequence = 1, deptree = 2, multiclass = 3 };

std::string_view to_string(TaskKind task) noexcept;
// Throws ContractError on unknown names.
TaskKind parse_task_kind(std::string_view name);

template <class Instance, class Structure>
struct Example {
    Instance instance;
    Structure gold;
};

template <class Instance, class Structure>
struct Dataset {
    using instance_type = Instance;
    using structure_type = Structure;

    TaskKind task;
    std::vector<Example<Instance, Structure>> examples;

    std::size_t size() const noexcept { return examples.size(); }
    bool empty() const noexcept { return examples.empty(); }
    const Example<Instance, Structure>& operator[](std::size_t i) const { return examples[i]; }
};

}  // namespace structlearn
