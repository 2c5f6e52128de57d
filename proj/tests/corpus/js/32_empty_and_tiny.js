function e(){}
const f=()=>{};
const g=()=>0;
class H{m(){}}
({n(){}});
