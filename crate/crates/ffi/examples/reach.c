#include <stdio.h>
#include "gts.h"
int main(void) {
  GtsWorkspace *ws = NULL;
  GtsStatus s = gts_workspace_parse("node A; edge b(A,A); rule p { bind x1:A, x2:A; lhs Nil; rhs b(x1,x2); } graph G0 { body nu x:A . b(x,x); } graph G1 { body nu x:A . (b(x,x) || b(x,x)); }", &ws);
  if (s != GTS_STATUS_OK) { printf("parse: %s\n", gts_last_error()); return 1; }
  size_t steps = 0;
  s = gts_workspace_reach(ws, "G1", 3, &steps);
  printf("status %d steps %zu\n", s, steps);
  gts_workspace_free(ws);
  return 0;
}
