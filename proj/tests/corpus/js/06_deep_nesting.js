function level0() {
  return function level1() {
    return () => {
      const o = {
        level3() {
          class Inner {
            level4() {
              return (() => function level6() { return 6; })();
            }
          }
          return new Inner().level4();
        },
      };
      return o.level3();
    };
  };
}
level0()()()();
