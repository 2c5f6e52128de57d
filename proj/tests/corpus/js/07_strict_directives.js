'use strict';
"another directive";

function withDirectives() {
  'use strict';
  "use asm";
  return this;
}

function notDirective() {
  ('use strict');
  return 1;
}

const arrowDirective = () => {
  "use strict";
  return 2;
};
