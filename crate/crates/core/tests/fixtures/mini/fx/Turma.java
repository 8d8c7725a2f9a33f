package fx;

import java.util.ArrayList;
import java.util.List;

public class Turma {
    private String codigo;
    private int vagas;
    private Curso curso;
    private List<Aluno> alunos = new ArrayList<>();

    public String getCodigo() {
        return codigo;
    }

    public int getVagas() {
        return vagas;
    }

    public Curso getCurso() {
        return curso;
    }

    public void addAluno(Aluno aluno) {
        if (alunos.size() < vagas && aluno != null) {
            alunos.add(aluno);
        }
    }

    public int totalCreditos() {
        int total = 0;
        for (Aluno a : alunos) {
            if (a.getCreditos() > 0) {
                total += a.getCreditos();
            }
        }
        return total;
    }
}
