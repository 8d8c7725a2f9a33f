//! Per-file smell counts of the "Matricula Componente" feature in the
//! published case study, 11 files totalling 11.

pub const CASE_STUDY: [(&str, u64); 11] = [
    ("GenericSigaaDAO.java", 0),
    ("ComponenteCurricular.java", 3),
    ("ComponenteDetalhes.java", 0),
    ("DiscenteAdapter.java", 0),
    ("DocenteTurma.java", 4),
    ("MatriculaComponenteMBean.java", 0),
    ("SituacaoTurma.java", 0),
    ("TipoComponenteCurricular.java", 0),
    ("Turma.java", 2),
    ("Curriculo.java", 1),
    ("Discente.java", 1),
];
