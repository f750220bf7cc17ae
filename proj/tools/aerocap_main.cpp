#include <cstdio>

int main() {
    std::puts("aerocap CLI placeholder");
    return 0;
}
