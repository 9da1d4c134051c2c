#pragma once

#include "busywait/lang.hpp"

#include <cstddef>
#include <vector>

namespace busywait {

/// All commands of exactly `nodes` AST nodes, in a fixed order.
std::vector<Command> commands_of_size(std::size_t nodes);

/// All commands of at most `max_nodes` AST nodes, smallest first.
std::vector<Command> enumerate_commands(std::size_t max_nodes);

}  // namespace busywait
