/* function fake() {} */
// function alsoFake() {}
function real(/* a comment */ a /* b */) /* between */ {
  // return function () {}
  /* function inComment() { } */
  return a; /* } */
}
/**
 * JSDoc with a `function () {}` example
 */
const described = function () /* { */ {
  return '/* not a comment */';
};
<!-- html-like comment opener
function afterHtmlComment() {}
--> html-like close at line start
