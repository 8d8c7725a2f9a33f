package fe;

public class Endereco {
    private String rua;
    private String cidade;
    private String cep;

    public String getRua() { return rua; }

    public String getCidade() { return cidade; }

    public String getCep() { return cep; }
}
