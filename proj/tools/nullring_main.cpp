#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "nullring/cli.hpp"

int main(int argc, char** argv) {
    using namespace nullring;
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const cli::CommandPlan plan = cli::parse(args);
        const cli::Report report = cli::execute(plan);
        if (plan.io.out_path.empty()) {
            std::cout << cli::render(report, plan.io);
        } else {
            std::ofstream out(plan.io.out_path);
            if (!out) {
                std::cerr << "error: cannot write to " << plan.io.out_path << "\n";
                return 2;
            }
            out << cli::render_to_file(report, plan.io);
        }
        return cli::exit_code(report.status);
    } catch (const cli::HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
