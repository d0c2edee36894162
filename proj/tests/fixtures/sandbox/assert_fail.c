#include <assert.h>

int run(void) {
    int expected = 2;
    assert(expected == 3);
    return 0;
}
