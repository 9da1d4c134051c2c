#include "busywait/corpus.hpp"

namespace busywait {

namespace {

const std::vector<Command>& of_size(std::vector<std::vector<Command>>& table, std::size_t n) {
    while (table.size() <= n) {
        const std::size_t k = table.size();
        std::vector<Command> out;
        if (k == 1) {
            out = {Command::exit(), Command::loop()};
        } else if (k >= 2) {
            for (const Command& body : table[k - 1]) out.push_back(Command::fork(body));
            for (std::size_t left = 1; left + 1 < k; ++left)
                for (const Command& a : table[left])
                    for (const Command& b : table[k - 1 - left]) out.push_back(Command::seq(a, b));
        }
        table.push_back(std::move(out));
    }
    return table[n];
}

}  // namespace

std::vector<Command> commands_of_size(std::size_t nodes) {
    std::vector<std::vector<Command>> table;
    return of_size(table, nodes);
}

std::vector<Command> enumerate_commands(std::size_t max_nodes) {
    std::vector<std::vector<Command>> table;
    std::vector<Command> all;
    for (std::size_t n = 1; n <= max_nodes; ++n) {
        const auto& layer = of_size(table, n);
        all.insert(all.end(), layer.begin(), layer.end());
    }
    return all;
}

}  // namespace busywait
